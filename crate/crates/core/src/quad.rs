//! Composite Gauss–Legendre rules shared by the kernel quadratures.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;

/// Nodes and weights of the 20-point rule mapped to [-1, 1].
fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let gl = GaussLegendre::new(NonZeroUsize::new(20).unwrap());
        gl.as_node_weight_pairs().to_vec()
    })
}

/// Integrates `f` over `[a, b]` split into `panels` equal panels.
pub(crate) fn composite<F: FnMut(f64) -> f64>(a: f64, b: f64, panels: usize, mut f: F) -> f64 {
    let panels = panels.max(1);
    let width = (b - a) / panels as f64;
    let half = 0.5 * width;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * width;
        let mut s = 0.0;
        for &(x, w) in rule() {
            s += w * f(mid + half * x);
        }
        total += s * half;
    }
    total
}
