//! Plain-text dump of a [`ConvexSubproblem`] for cross-checking with other
//! solvers.
//!
//! ```text
//! qcqp 1
//! vars <n>
//! constraints <m>
//! function objective
//! constant <c>
//! linear <l_0> <l_1> … <l_{n-1}>
//! quad <nnz>
//! <row> <col> <value>        (upper triangle incl. diagonal, 0-based)
//! function <kind>            (one block per constraint, meaning f(x) ≤ 0)
//! …
//! end
//! ```
//!
//! Every function is `xᵀQx + lᵀx + c` with `Q` symmetric; only the upper
//! triangle is written. Numbers use Rust's shortest round-trip formatting.

use std::io::{self, Write};

use super::{ConvexSubproblem, Quadratic};

pub fn write_dump<W: Write>(problem: &ConvexSubproblem, mut out: W) -> io::Result<()> {
    writeln!(out, "qcqp 1")?;
    writeln!(out, "vars {}", problem.num_vars())?;
    writeln!(out, "constraints {}", problem.constraints.len())?;
    write_function(&mut out, "objective", &problem.objective)?;
    for c in &problem.constraints {
        write_function(&mut out, &c.kind.to_string(), &c.f)?;
    }
    writeln!(out, "end")
}

fn write_function<W: Write>(out: &mut W, name: &str, f: &Quadratic) -> io::Result<()> {
    writeln!(out, "function {name}")?;
    writeln!(out, "constant {:?}", f.constant)?;
    write!(out, "linear")?;
    for v in f.lin.iter() {
        write!(out, " {v:?}")?;
    }
    writeln!(out)?;
    let mut entries = Vec::new();
    if let Some(q) = &f.quad {
        for j in 0..q.ncols() {
            for i in 0..=j {
                if q[(i, j)] != 0.0 {
                    entries.push((i, j, q[(i, j)]));
                }
            }
        }
    }
    writeln!(out, "quad {}", entries.len())?;
    for (i, j, v) in entries {
        writeln!(out, "{i} {j} {v:?}")?;
    }
    Ok(())
}
