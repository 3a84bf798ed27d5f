//! Combining independently read layers into one graph's tables.
//!
//! Each layer gets a disjoint node-id range and arcs are renumbered
//! sequentially in layer order. With boundary merging enabled, nodes from
//! *different* layers carrying identical times are unified, which is what
//! gives word and phone chains their shared boundary nodes. A layer that
//! contributes more than one node at some time (a zero-width event pair)
//! is left untouched at that time, since unifying either endpoint would
//! be arbitrary and unifying both would create a self-loop.

use std::collections::BTreeMap;

use crate::graph::{ArcId, NodeId, TimePoint};

use super::Layer;

/// Flattens layers into one table pair. `merge_boundaries` unifies
/// equal-time nodes across layers; the surviving node is the one from the
/// earliest layer.
pub fn combine_layers(layers: &[Layer], merge_boundaries: bool) -> Layer {
    let mut combined = Layer::default();
    let mut offsets = Vec::with_capacity(layers.len());
    let mut next_node = 0u32;
    let mut next_arc = 1u32;
    let mut node_layer: BTreeMap<NodeId, usize> = BTreeMap::new();

    for (layer_idx, layer) in layers.iter().enumerate() {
        offsets.push(next_node);
        let top = layer
            .arcs
            .iter()
            .flat_map(|a| [a.src.0, a.dst.0])
            .chain(layer.times.iter().map(|(n, _)| n.0))
            .max();
        for arc in &layer.arcs {
            let mut arc = arc.clone();
            arc.id = ArcId(next_arc);
            next_arc += 1;
            arc.src = NodeId(arc.src.0 + next_node);
            arc.dst = NodeId(arc.dst.0 + next_node);
            node_layer.insert(arc.src, layer_idx);
            node_layer.insert(arc.dst, layer_idx);
            combined.arcs.push(arc);
        }
        for (node, time) in &layer.times {
            let node = NodeId(node.0 + next_node);
            node_layer.insert(node, layer_idx);
            combined.times.push((node, *time));
        }
        next_node += top.map_or(0, |t| t + 1);
    }

    if merge_boundaries {
        let mut by_time: BTreeMap<TimePoint, Vec<NodeId>> = BTreeMap::new();
        for (node, time) in &combined.times {
            by_time.entry(*time).or_default().push(*node);
        }
        let mut remap: BTreeMap<NodeId, NodeId> = BTreeMap::new();
        for nodes in by_time.values() {
            let mut per_layer: BTreeMap<usize, Vec<NodeId>> = BTreeMap::new();
            for node in nodes {
                per_layer.entry(node_layer[node]).or_default().push(*node);
            }
            let candidates: Vec<NodeId> = per_layer
                .values()
                .filter(|v| v.len() == 1)
                .map(|v| v[0])
                .collect();
            if candidates.len() > 1 {
                let survivor = candidates[0];
                for node in &candidates[1..] {
                    remap.insert(*node, survivor);
                }
            }
        }
        if !remap.is_empty() {
            for arc in &mut combined.arcs {
                if let Some(n) = remap.get(&arc.src) {
                    arc.src = *n;
                }
                if let Some(n) = remap.get(&arc.dst) {
                    arc.dst = *n;
                }
            }
            combined.times.retain(|(n, _)| !remap.contains_key(n));
        }
    }

    combined
}
