"""Pure-Python run enumeration; the compiled kernel mirrors this exactly."""


def explore(n_machines, base, init, start, t_out, t_cm, t_tgt, has_input, n_cm,
            bound, stable, accept):
    locs = list(init)
    buf = [0] * n_cm
    check = accept is not None
    runs = []
    visited = 0
    path = []          # transition ids
    undo = []          # (machine, previous local, cm, delta)
    on_path = set()
    keys = []
    oks = []
    # each frame: [enabled transition ids, next index]
    frames = []

    def enabled_here():
        out = []
        for m in range(n_machines):
            g = base[m] + locs[m]
            for t in range(start[g], start[g + 1]):
                if t_out[t] or buf[t_cm[t]] > 0:
                    out.append((t, m))
        return out

    def successful():
        for c in stable:
            if buf[c]:
                return False
        for m in range(n_machines):
            if not accept[base[m] + locs[m]]:
                return False
        return True

    def enter(parent_ok):
        nonlocal visited
        visited += 1
        ok = parent_ok or (check and successful())
        key = (tuple(locs), tuple(buf))
        if key in on_path:
            runs.append((tuple(path), 3, ok))
            return False
        en = enabled_here()
        if not en:
            dead = any(buf) or any(has_input[base[m] + locs[m]] for m in range(n_machines))
            runs.append((tuple(path), 1 if dead else 0, ok))
            return False
        if len(path) >= bound:
            runs.append((tuple(path), 2, ok))
            return False
        on_path.add(key)
        keys.append(key)
        oks.append(ok)
        frames.append([en, 0])
        return True

    enter(False)
    while frames:
        frame = frames[-1]
        en, i = frame
        if i == len(en):
            frames.pop()
            on_path.discard(keys.pop())
            oks.pop()
            if undo:
                m, prev, cm, delta = undo.pop()
                locs[m] = prev
                buf[cm] -= delta
                path.pop()
            continue
        frame[1] = i + 1
        t, m = en[i]
        delta = 1 if t_out[t] else -1
        undo.append((m, locs[m], t_cm[t], delta))
        locs[m] = t_tgt[t]
        buf[t_cm[t]] += delta
        path.append(t)
        if not enter(oks[-1]):
            m, prev, cm, delta = undo.pop()
            locs[m] = prev
            buf[cm] -= delta
            path.pop()
    return runs, visited
