//! Plain-text edge list: one `child parent xi m` line per vertex `2..=n`.

use std::io::{BufRead, Write};

use super::trace::TreeTrace;
use crate::error::{Error, Result};
use crate::kernels::AttachmentKernel;

pub fn write_edge_list<W: Write>(trace: &TreeTrace, config_hash: &str, mut out: W) -> Result<()> {
    writeln!(out, "# config_hash={config_hash}")?;
    writeln!(out, "# n={}", trace.len())?;
    writeln!(out, "# child parent xi m")?;
    for v in 2..=trace.len() {
        let p = trace.parent(v).expect("non-root has a parent");
        writeln!(out, "{v} {p} {} {}", trace.xi(v), trace.snapshot(v))?;
    }
    Ok(())
}

/// Parse an edge list back into a trace; returns the recorded config hash.
pub fn read_edge_list<R: BufRead>(
    input: R,
    kernel: &AttachmentKernel<f64>,
) -> Result<(String, TreeTrace)> {
    let bad =
        |line: usize, msg: &str| Error::InvalidArgument(format!("edge list line {line}: {msg}"));
    let mut hash = String::new();
    let mut expected_n = None;
    let mut trace = TreeTrace::new(kernel);
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(h) = rest.strip_prefix("config_hash=") {
                hash = h.to_string();
            } else if let Some(n) = rest.strip_prefix("n=") {
                expected_n = Some(
                    n.parse::<usize>()
                        .map_err(|_| bad(lineno, "bad vertex count"))?,
                );
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(bad(lineno, "expected 4 fields"));
        }
        let child: usize = fields[0].parse().map_err(|_| bad(lineno, "bad child"))?;
        let parent: usize = fields[1].parse().map_err(|_| bad(lineno, "bad parent"))?;
        let xi: f64 = fields[2].parse().map_err(|_| bad(lineno, "bad xi"))?;
        let m: usize = fields[3].parse().map_err(|_| bad(lineno, "bad snapshot"))?;
        if child != trace.len() + 1 {
            return Err(bad(lineno, "vertices must appear in birth order"));
        }
        if parent == 0 || parent > m || m >= child {
            return Err(bad(
                lineno,
                "parent must lie in the snapshot [1, m] with m < child",
            ));
        }
        trace.push(parent, xi, m, kernel);
    }
    if let Some(n) = expected_n {
        if n != trace.len() {
            return Err(Error::InvalidArgument(format!(
                "edge list declares n={n} but holds {} vertices",
                trace.len()
            )));
        }
    }
    Ok((hash, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::grow;
    use crate::kernels::{DelayKind, DelayLaw, GrowthConfig};

    #[test]
    fn round_trip() {
        let k = AttachmentKernel::affine(0.0).unwrap();
        let c = GrowthConfig::new(
            500,
            k.clone(),
            DelayLaw::new(DelayKind::InversePowerOfUniform(2.0), 0.5).unwrap(),
            5,
        );
        let t = grow(&c).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&t, "abc123", &mut buf).unwrap();
        let (hash, back) = read_edge_list(&buf[..], &k).unwrap();
        assert_eq!(hash, "abc123");
        assert_eq!(back, t);
    }

    #[test]
    fn rejects_out_of_order() {
        let k = AttachmentKernel::uniform();
        assert!(read_edge_list("3 1 0 1\n".as_bytes(), &k).is_err());
        assert!(read_edge_list("2 1 0 1\n3 3 0 2\n".as_bytes(), &k).is_err());
    }
}
