use crate::tunnel::{DistanceMeasure, FlowStatus, TunnelRun};

/// Tolerance under the Hilbert-Schmidt distance for calling two points the same state.
pub const HS_REVISIT_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RevisitStats {
    /// Tunneling phases whose landing point was judged the same as their origin.
    pub n_revisits: usize,
    /// Tunneling phases started.
    pub n_tunnel_starts: usize,
}

/// Counts tunneling phases that come back to where they started.
///
/// Each tunneling phase links its origin stable point to the next settled
/// point: the following stable point when it escaped, or the flow's final
/// iterate when it ran out of iterations. A revisit is a link whose two ends
/// are closer than `tol` under `dist`.
pub fn revisit_statistics<'a>(
    runs: impl IntoIterator<Item = &'a TunnelRun>,
    dist: &dyn DistanceMeasure,
    tol: f64,
) -> RevisitStats {
    let mut stats = RevisitStats::default();
    for run in runs {
        for t in &run.tunnels {
            stats.n_tunnel_starts += 1;
            let origin = &run.stable_points[t.origin].token;
            let next = match t.status {
                FlowStatus::Escaped => run.stable_points.get(t.origin + 1).map_or(&t.end, |sp| &sp.token),
                FlowStatus::Exhausted => &t.end,
            };
            if dist.distance(origin, next) < tol {
                stats.n_revisits += 1;
            }
        }
    }
    stats
}
