"""Trace-based protocol checks shared by unit and acceptance tests."""

from collections import defaultdict


def check_trace(net, trace):
    """Return a list of violation messages for one finished, drained run."""
    problems = []
    routers = set(net.routers)

    in_flight = defaultdict(set)  # router -> names with an upstream Interest outstanding
    justified = defaultdict(int)  # (t, router, name) -> pending hit/satisfy justifications
    for t, event, node, name in trace:
        if node not in routers:
            continue
        if event == "forward":
            if name in in_flight[node]:
                problems.append(f"router {node} forwarded {name} twice at {t}")
            in_flight[node].add(name)
        elif event in ("satisfy", "pit_expire", "nack"):
            in_flight[node].discard(name)
            if event == "satisfy":
                justified[(t, node, name)] += len(net.topology.neighbors(node))
        elif event == "hit":
            justified[(t, node, name)] += 1
        elif event == "data_out":
            key = (t, node, name)
            if justified[key] <= 0:
                problems.append(f"router {node} sent {name} at {t} without PIT entry or CS hit")
            justified[key] -= 1

    totals = net.totals()
    if totals["issued"] != totals["satisfied"] + totals["expired"] + totals["dropped"]:
        problems.append(f"conservation broken: {totals}")
    return problems
