"""Numba kernels for the hot loops.

Everything here is exact integer (or bit-reproducible float64) arithmetic;
the event-driven filter kernels are differentially tested against the
per-cycle references in ``reference.py`` and must stay bit-identical.
"""
from __future__ import annotations

import numpy as np
from numba import njit

_JIT = dict(cache=True, nogil=True)


@njit(**_JIT)
def sigma_delta_kernel(x):
    """Second-order error-feedback 1-bit modulator.

    Per sample: u = x + 2*s1 - s2; bit = (u >= 0); feedback error
    s1' = u - (+-1), s2' = s1. The error states stay bounded for inputs in
    [-1, +1] (the bound grows toward full scale; see the stimulus tests).
    """
    bits = np.empty(x.size, np.uint8)
    s1 = 0.0
    s2 = 0.0
    for i in range(x.size):
        u = x[i] + 2.0 * s1 - s2
        if u >= 0.0:
            bits[i] = 1
            q = 1.0
        else:
            bits[i] = 0
            q = -1.0
        s2 = s1
        s1 = u - q
    return bits


@njit(**_JIT)
def slpf_event_kernel(t_in, p_in, t_end, g, n_bits, integrator_limit,
                      init_i, init_acc):
    """Event-driven spike low-pass filter.

    State: integrator I (input-minus-output spike count, clamped to
    +-integrator_limit) and generator phase accumulator acc in [0, 2^N).
    Each core cycle the accumulator advances by g*|I| (saturated to 2^N - 1)
    and emits one spike of polarity sign(I) on overflow; the emitted spike
    is fed back into I at the end of the same cycle. Idle cycles (I == 0 and
    no pending input) are skipped in closed form, which is bit-identical to
    the per-cycle reference.

    t_end < 0 runs past the last input event until the integrator drains.
    Returns (out_t, out_p, I, acc, integrator_saturations, generator_saturations).
    """
    lim = np.int64(1) << n_bits
    cap = max(1024, t_in.size)
    out_t = np.empty(cap, np.int64)
    out_p = np.empty(cap, np.int8)
    n = 0
    I = init_i
    acc = init_acc
    sat_i = np.int64(0)
    sat_g = np.int64(0)
    t_cur = np.int64(0)
    m = t_in.size
    k = 0
    while True:
        if k < m:
            te = t_in[k]
        elif t_end >= 0:
            te = t_end
        else:
            te = np.int64(2) ** 62
        # closed-form advance over [t_cur, te): drive is constant between
        # emissions, each emission pulls |I| down by one
        while I != 0 and t_cur < te:
            s = I if I > 0 else -I
            s *= g
            saturated = s >= lim
            if saturated:
                s = lim - 1
            steps = (lim - acc + s - 1) // s
            if t_cur + steps - 1 < te:
                if n >= cap:
                    new_t = np.empty(cap * 2, np.int64)
                    new_p = np.empty(cap * 2, np.int8)
                    new_t[:cap] = out_t
                    new_p[:cap] = out_p
                    out_t = new_t
                    out_p = new_p
                    cap *= 2
                out_t[n] = t_cur + steps - 1
                out_p[n] = 1 if I > 0 else -1
                n += 1
                acc += steps * s - lim
                if saturated:
                    sat_g += steps
                I += -1 if I > 0 else 1
                t_cur += steps
            else:
                adv = te - t_cur
                acc += adv * s
                if saturated:
                    sat_g += adv
                t_cur = te
        if k >= m:
            if I == 0 or t_end >= 0:
                break
            continue
        if t_end >= 0 and te >= t_end:
            break  # events at or past the horizon are never processed
        if t_cur < te:
            t_cur = te
        # the input-event cycle itself runs as one explicit per-cycle step
        while k < m and t_in[k] == te:
            I += p_in[k]
            if I > integrator_limit:
                I = integrator_limit
                sat_i += 1
            elif I < -integrator_limit:
                I = -integrator_limit
                sat_i += 1
            k += 1
        if I != 0:
            s = I if I > 0 else -I
            s *= g
            if s >= lim:
                s = lim - 1
                sat_g += 1
            acc += s
            if acc >= lim:
                acc -= lim
                if n >= cap:
                    new_t = np.empty(cap * 2, np.int64)
                    new_p = np.empty(cap * 2, np.int8)
                    new_t[:cap] = out_t
                    new_p[:cap] = out_p
                    out_t = new_t
                    out_p = new_p
                    cap *= 2
                out_t[n] = te
                out_p[n] = 1 if I > 0 else -1
                n += 1
                I += -1 if I > 0 else 1
        t_cur = te + 1
    return out_t[:n].copy(), out_p[:n].copy(), I, acc, sat_i, sat_g


@njit(**_JIT)
def hold_and_fire_kernel(t_a, p_a, t_b, p_b, hold):
    """Spike-rate subtractor: merge a with sign-inverted b, hold each spike
    for `hold` cycles, cancel held spikes against opposite-polarity arrivals
    (oldest held first), fire survivors at arrival + hold.

    Held spikes always share one polarity. A same-cycle arrival that would
    duplicate the newest held entry is collapsed and counted instead (keeps
    at most one event per output cycle). Equal input timestamps process the
    a event before the b event.

    Returns (out_t, out_p, merged_count).
    """
    na, nb = t_a.size, t_b.size
    cap = max(64, na + nb)
    out_t = np.empty(cap, np.int64)
    out_p = np.empty(cap, np.int8)
    n = 0
    qcap = 1024
    q_t = np.empty(qcap, np.int64)
    q_head = 0
    q_len = 0
    q_pol = np.int8(0)
    merged = np.int64(0)
    ia = 0
    ib = 0
    while ia < na or ib < nb:
        if ib >= nb or (ia < na and t_a[ia] <= t_b[ib]):
            t = t_a[ia]
            pol = p_a[ia]
            ia += 1
        else:
            t = t_b[ib]
            pol = np.int8(-p_b[ib])
            ib += 1
        # fire everything due before this arrival is considered
        while q_len > 0 and q_t[q_head] + hold <= t:
            if n >= cap:
                new_t = np.empty(cap * 2, np.int64)
                new_p = np.empty(cap * 2, np.int8)
                new_t[:cap] = out_t
                new_p[:cap] = out_p
                out_t = new_t
                out_p = new_p
                cap *= 2
            out_t[n] = q_t[q_head] + hold
            out_p[n] = q_pol
            n += 1
            q_head += 1
            if q_head == qcap:
                q_head = 0
            q_len -= 1
        if q_len > 0 and q_pol != pol:
            q_head += 1
            if q_head == qcap:
                q_head = 0
            q_len -= 1
        else:
            tail = q_head + q_len - 1
            if tail >= qcap:
                tail -= qcap
            if q_len > 0 and q_t[tail] == t:
                merged += 1
            else:
                if q_len == qcap:
                    new_q = np.empty(qcap * 2, np.int64)
                    for i in range(q_len):
                        new_q[i] = q_t[(q_head + i) % qcap]
                    q_t = new_q
                    q_head = 0
                    qcap *= 2
                pos = q_head + q_len
                if pos >= qcap:
                    pos -= qcap
                q_t[pos] = t
                q_len += 1
                q_pol = pol
    while q_len > 0:
        if n >= cap:
            new_t = np.empty(cap * 2, np.int64)
            new_p = np.empty(cap * 2, np.int8)
            new_t[:cap] = out_t
            new_p[:cap] = out_p
            out_t = new_t
            out_p = new_p
            cap *= 2
        out_t[n] = q_t[q_head] + hold
        out_p[n] = q_pol
        n += 1
        q_head += 1
        if q_head == qcap:
            q_head = 0
        q_len -= 1
    return out_t[:n].copy(), out_p[:n].copy(), merged
