"""Pure-Python epsilon-greedy betting loop.

Reference twin of the compiled ``_bandit`` extension. Both consume the same
pre-drawn random streams and must produce bit-identical totals and counts.
"""


def run_bandit(data, explore, explore_arm, tie_u, reward_hit, reward_miss,
               totals, counts, trajectory):
    """Run ``len(data)`` betting steps, updating ``totals``/``counts`` in place."""
    n_arms = len(totals)
    record = len(trajectory) > 0
    # plain lists: indexing numpy scalars in a Python loop is several times slower
    data_l = data.tolist()
    explore_l = explore.tolist()
    arm_l = explore_arm.tolist()
    tie_l = tie_u.tolist()
    hit = reward_hit.tolist()
    miss = reward_miss.tolist()
    tot = totals.tolist()
    cnt = counts.tolist()
    avg = [tot[k] / cnt[k] if cnt[k] > 0 else 0.0 for k in range(n_arms)]
    traj = [] if record else None

    for s in range(len(data_l)):
        if explore_l[s]:
            arm = arm_l[s]
        else:
            best = max(avg)
            n_tied = avg.count(best)
            if n_tied == 1:
                arm = avg.index(best)
            else:
                pick = min(int(tie_l[s] * n_tied), n_tied - 1)
                arm = [k for k in range(n_arms) if avg[k] == best][pick]
        r = hit[arm] if data_l[s] else miss[arm]
        tot[arm] = tot[arm] + r
        cnt[arm] = cnt[arm] + 1
        avg[arm] = tot[arm] / cnt[arm]
        if record:
            traj.append(arm)

    totals[:] = tot
    counts[:] = cnt
    if record:
        trajectory[:] = traj
