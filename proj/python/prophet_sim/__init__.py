"""Python bindings for the prophet temporal prefetching simulator."""

from ._core import *  # noqa: F401,F403
from ._core import ProphetError, __doc__  # noqa: F401


def pipeline(trace, config=None, policies=("nopf", "nofilter", "patternconf", "prophet")):
    """Profile, learn and analyze `trace`, then simulate it under each policy.

    Returns (manifest, {policy: SimReport}).
    """
    cfg = config if config is not None else RunConfig()  # noqa: F405
    counters = profile(trace, cfg.effective_profile())  # noqa: F405
    store = CounterStore()  # noqa: F405
    store.cap_L = cfg.cap_L
    store = learn(store, counters)  # noqa: F405
    manifest = analyze(store, cfg.effective_analysis())  # noqa: F405
    reports = {}
    for name in policies:
        sim = cfg.sim
        sim.policy = name
        reports[name] = simulate(trace, sim, manifest)  # noqa: F405
    return manifest, reports
