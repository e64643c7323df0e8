//! Bottom-up construction of nets, c-lists and the compacted tree.

use super::tree::{HierarchyTree, TreeNode, NONE};
use super::{CListStore, NetHierarchy, NetLevels, MIN_LIST_C};
use crate::error::{Error, Result};
use crate::metric::{top_level_for, Backing, PointId, PointSet};
use crate::vptree::RangeIndex;

/// How range searches are answered during construction. Both strategies
/// produce identical structures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BuildStrategy {
    /// Vantage-point trees per level for coordinate data, linear scans for
    /// matrix data.
    #[default]
    Indexed,
    /// Linear scans everywhere, `O(m^2)` per level.
    Exhaustive,
}

/// Lists of one level, laid out in the order of that level's net.
struct LevelLists {
    start: Vec<u32>,
    payload: Vec<u32>,
}

impl NetHierarchy {
    /// Builds the hierarchy with c-list radius constant `c`.
    pub fn build(ps: &PointSet, c: u32) -> Result<Self> {
        Self::build_with(ps, c, BuildStrategy::Indexed)
    }

    pub fn build_with(ps: &PointSet, c: u32, strategy: BuildStrategy) -> Result<Self> {
        if c < MIN_LIST_C {
            return Err(Error::InvalidParams(format!(
                "list constant c = {c} is below the minimum {MIN_LIST_C}"
            )));
        }
        let m = ps.len();
        if m == 0 {
            return Err(Error::EmptyPointSet);
        }
        let i_top = if m == 1 {
            0
        } else {
            top_level_for(ps.compute_stats()?.diameter)
        };
        let use_tree =
            strategy == BuildStrategy::Indexed && matches!(ps.backing(), Backing::Coords { .. });

        let mut top = vec![0i32; m];
        let mut tparent = vec![NONE; m];
        let mut per_level: Vec<LevelLists> = Vec::with_capacity(i_top as usize + 1);
        let mut prev: Vec<u32> = (0..m as u32).collect();
        let mut index = RangeIndex::new(ps, prev.clone(), use_tree);

        // Level-0 lists reach into Y_{-1} = M.
        per_level.push(level_lists(
            ps,
            &index,
            &prev,
            c as f64,
            0,
            &mut tparent,
            &top,
        ));

        let mut selected = vec![false; m];
        for i in 1..=i_top {
            let radius = (2.0f64).powi(i);
            let mut net = Vec::new();
            for &z in &prev {
                let covered =
                    !index.visit(ps, z as usize, radius, true, |y, _| !selected[y as usize]);
                if !covered {
                    selected[z as usize] = true;
                    top[z as usize] = i;
                    net.push(z);
                }
            }
            per_level.push(level_lists(
                ps,
                &index,
                &net,
                c as f64 * radius,
                i,
                &mut tparent,
                &top,
            ));
            for &z in &net {
                selected[z as usize] = false;
            }
            if i < i_top {
                index = RangeIndex::new(ps, net.clone(), use_tree);
            }
            prev = net;
        }
        debug_assert!(m == 1 || prev == vec![0]);

        let nets = NetLevels::from_top(i_top, top);
        let lists = assemble_lists(&nets, c, per_level);
        let tree = compact_tree(&nets, &lists, &tparent);
        Ok(NetHierarchy { nets, lists, tree })
    }
}

/// Computes `L_{y,i,c}` for every `y` in `net` (= `Y_i`) against the points
/// held by `index` (= `Y_{i-1}`), and records tree parents of points whose
/// top level is `i - 1`.
fn level_lists(
    ps: &PointSet,
    index: &RangeIndex,
    net: &[u32],
    radius: f64,
    i: i32,
    tparent: &mut [u32],
    top: &[i32],
) -> LevelLists {
    let arc = (2.0f64).powi(i);
    let mut start = Vec::with_capacity(net.len() + 1);
    let mut payload = Vec::new();
    let mut buf: Vec<(f64, u32)> = Vec::new();
    for &y in net {
        buf.clear();
        index.visit(ps, y as usize, radius, false, |z, d| {
            buf.push((d, z));
            true
        });
        buf.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        if i >= 1 {
            for &(d, z) in &buf {
                if d > arc {
                    break;
                }
                if top[z as usize] == i - 1 && tparent[z as usize] == NONE {
                    tparent[z as usize] = y;
                }
            }
        }
        start.push(payload.len() as u32);
        if buf.len() > 1 {
            payload.extend(buf.iter().map(|&(_, z)| z));
        }
    }
    start.push(payload.len() as u32);
    LevelLists { start, payload }
}

fn assemble_lists(nets: &NetLevels, c: u32, per_level: Vec<LevelLists>) -> CListStore {
    let m = nets.top.len();
    let mut base = Vec::with_capacity(m + 1);
    let mut slots = 0u32;
    for &t in &nets.top {
        base.push(slots);
        slots += t as u32 + 1;
    }
    base.push(slots);
    let mut ranges = Vec::with_capacity(slots as usize + 1);
    let total: usize = per_level.iter().map(|l| l.payload.len()).sum();
    let mut payload = Vec::with_capacity(total);
    for (y, &t) in nets.top.iter().enumerate() {
        for i in 0..=t {
            let level = &per_level[i as usize];
            let pos = nets.levels[i as usize]
                .binary_search(&PointId(y as u32))
                .expect("net member");
            let s = level.start[pos] as usize;
            let e = level.start[pos + 1] as usize;
            ranges.push(payload.len() as u32);
            payload.extend_from_slice(&level.payload[s..e]);
        }
    }
    ranges.push(payload.len() as u32);
    CListStore {
        c,
        base,
        ranges,
        payload,
    }
}

/// Splits each point's copies into runs broken below every nontrivial list,
/// then links each point's top run to the run of its tree parent.
pub(crate) fn compact_tree(nets: &NetLevels, lists: &CListStore, tparent: &[u32]) -> HierarchyTree {
    let m = nets.top.len();
    let mut nodes = Vec::new();
    let mut parent = Vec::new();
    let mut seg_start = Vec::with_capacity(m + 1);
    for (y, &t) in nets.top.iter().enumerate() {
        seg_start.push(nodes.len());
        let point = PointId(y as u32);
        let mut hi = t;
        for l in (1..=t).rev() {
            if !lists.is_trivial(point, l) {
                nodes.push(TreeNode { point, hi, lo: l });
                hi = l - 1;
            }
        }
        nodes.push(TreeNode { point, hi, lo: 0 });
    }
    seg_start.push(nodes.len());
    for y in 0..m {
        for k in seg_start[y]..seg_start[y + 1] {
            if k > seg_start[y] {
                parent.push((k - 1) as u32);
            } else if tparent[y] == NONE {
                parent.push(NONE);
            } else {
                let p = tparent[y] as usize;
                let level = nets.top[y] + 1;
                let seg = (seg_start[p]..seg_start[p + 1])
                    .find(|&s| nodes[s].lo <= level && level <= nodes[s].hi)
                    .expect("parent run covers the attachment level");
                parent.push(seg as u32);
            }
        }
    }
    HierarchyTree::from_links(nodes, parent, m)
}
