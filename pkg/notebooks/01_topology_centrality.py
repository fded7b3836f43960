"""
Centrality on the Abilene backbone
==================================

Load the bundled topology, then compare the two structural signals the
baselines and the fused score start from: betweenness and degree.
"""

from ndncache import topology as tp

topo = tp.load_topology(tp.shipped_topology_path())
print(f"{topo.n} nodes: {len(topo.routers)} routers, "
      f"{len(topo.consumers)} consumers, {len(topo.producers)} producers")

# betweenness counts unordered pairs over the whole graph, endpoints excluded
bc = tp.betweenness(topo)
deg = tp.degree_centrality(topo)

print("router  betweenness  degree")
for r in sorted(bc, key=bc.get, reverse=True):
    print(f"{r:6d}  {bc[r]:11.3f}  {deg[r]:6.0f}")

# the most and least central routers get the largest and smallest share
# under any betweenness-led allocation
print("argmax", max(bc, key=bc.get), "argmin", min(bc, key=bc.get))

# next hops are minimum-hop, ties go to the lowest neighbour id
hops = tp.next_hops(topo)
c, p = topo.consumers[0], topo.producers[0]
route = [c]
while route[-1] != p:
    route.append(hops[(route[-1], p)])
print("route", " -> ".join(map(str, route)))
