//! Line-oriented, versioned serialisation of complexes.
//!
//! ```text
//! qfloer-complex v1
//! truncation 16 integer
//! gen x1 class 0 u -
//! gen y1 class 0 u 3
//! d 0 1 1,0,-1
//! end
//! ```
//!
//! Generators are listed in index order; `d` lines reference them by index so
//! names stay free-form (no whitespace). Missing high-order coefficients are
//! zero. Blank lines and `#` comments are ignored. The trailing `end` guards
//! against truncated files.

use crate::complex::Complex;
use crate::ring::Truncation;
use crate::NovError;
use std::fmt::Write as _;

pub fn render(c: &Complex) -> Result<String, NovError> {
    let mut out = String::new();
    out.push_str("qfloer-complex v1\n");
    let _ = writeln!(
        out,
        "truncation {} {}",
        c.tr.order,
        if c.tr.mod2 { "mod2" } else { "integer" }
    );
    for g in &c.gens {
        if g.name.chars().any(char::is_whitespace) || g.name.is_empty() {
            return Err(NovError::Other(format!(
                "generator name {:?} cannot be serialised",
                g.name
            )));
        }
        let u = match g.u_index {
            Some(i) => i.to_string(),
            None => "-".to_string(),
        };
        let _ = writeln!(out, "gen {} class {} u {}", g.name, g.class_id, u);
    }
    for from in 0..c.len() {
        for (&to, v) in c.row(from) {
            let coeffs: Vec<String> = v.coeffs().iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "d {} {} {}", from, to, coeffs.join(","));
        }
    }
    out.push_str("end\n");
    Ok(out)
}

pub fn parse(text: &str) -> Result<Complex, NovError> {
    let err = |line: usize, msg: String| NovError::Parse { line, msg };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (ln, header) = lines
        .next()
        .ok_or_else(|| err(0, "empty input".to_string()))?;
    if header != "qfloer-complex v1" {
        return Err(err(ln, format!("unsupported header {:?}", header)));
    }
    let (ln, trunc_line) = lines
        .next()
        .ok_or_else(|| err(ln, "missing truncation line".to_string()))?;
    let tparts: Vec<&str> = trunc_line.split_whitespace().collect();
    if tparts.len() != 3 || tparts[0] != "truncation" {
        return Err(err(ln, "expected: truncation <order> integer|mod2".to_string()));
    }
    let order: usize = tparts[1]
        .parse()
        .map_err(|_| err(ln, format!("bad truncation order {:?}", tparts[1])))?;
    let tr = match tparts[2] {
        "integer" => Truncation::integer(order),
        "mod2" => Truncation::mod2(order),
        other => return Err(err(ln, format!("unknown coefficient mode {:?}", other))),
    };
    let mut c = Complex::new(tr);
    let mut ended = false;

    for (ln, line) in lines {
        if ended {
            return Err(err(ln, "content after end".to_string()));
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts[0] {
            "gen" => {
                if parts.len() != 6 || parts[2] != "class" || parts[4] != "u" {
                    return Err(err(ln, "expected: gen <name> class <id> u <level|->".to_string()));
                }
                let class_id: usize = parts[3]
                    .parse()
                    .map_err(|_| err(ln, format!("bad class id {:?}", parts[3])))?;
                let u_index = match parts[5] {
                    "-" => None,
                    s => Some(
                        s.parse::<u32>()
                            .map_err(|_| err(ln, format!("bad tower level {:?}", s)))?,
                    ),
                };
                c.add_gen(parts[1], class_id, u_index);
            }
            "d" => {
                if parts.len() != 4 {
                    return Err(err(ln, "expected: d <from> <to> <c0,c1,...>".to_string()));
                }
                let from: usize = parts[1]
                    .parse()
                    .map_err(|_| err(ln, format!("bad generator index {:?}", parts[1])))?;
                let to: usize = parts[2]
                    .parse()
                    .map_err(|_| err(ln, format!("bad generator index {:?}", parts[2])))?;
                if from >= c.len() || to >= c.len() {
                    return Err(err(ln, "differential references an unknown generator".to_string()));
                }
                let coeffs: Vec<num_bigint::BigInt> = parts[3]
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<num_bigint::BigInt>()
                            .map_err(|_| err(ln, format!("bad coefficient {:?}", s)))
                    })
                    .collect::<Result<_, _>>()?;
                if coeffs.len() > tr.order + 1 {
                    return Err(err(
                        ln,
                        format!(
                            "{} coefficients exceed truncation order {}",
                            coeffs.len(),
                            tr.order
                        ),
                    ));
                }
                c.set_diff(from, to, tr.elem_big(coeffs));
            }
            "end" => ended = true,
            other => return Err(err(ln, format!("unknown directive {:?}", other))),
        }
    }
    if !ended {
        return Err(err(text.lines().count(), "missing end line (truncated file?)".to_string()));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::{elementary, scramble, SampleSpec};

    #[test]
    fn roundtrip_preserves_everything() {
        let tr = Truncation::integer(6);
        let mut c = Complex::new(tr);
        let a = c.add_gen("p1q2r1", 3, None);
        let b = c.add_gen("tower", 3, Some(2));
        c.add_gen("lonely", 5, None);
        c.set_diff(a, b, tr.elem(&[1, 0, -4]));
        let text = render(&c).unwrap();
        let back = parse(&text).unwrap();
        assert_eq!(back.gens, c.gens);
        assert_eq!(back.tr.order, 6);
        assert!(!back.tr.mod2);
        for i in 0..c.len() {
            for j in 0..c.len() {
                assert_eq!(back.diff(i, j), c.diff(i, j));
            }
        }
    }

    #[test]
    fn roundtrip_of_a_scrambled_mod2_complex() {
        let tr = Truncation::mod2(5);
        let mut c = elementary(
            tr,
            &[SampleSpec {
                class_id: 1,
                free: 2,
                torsion: vec![1, 2],
                unit_pairs: 1,
            }],
        );
        scramble(&mut c, 7, 30);
        let text = render(&c).unwrap();
        let back = parse(&text).unwrap();
        assert_eq!(render(&back).unwrap(), text);
    }

    #[test]
    fn version_and_structure_errors_carry_line_numbers() {
        assert!(matches!(
            parse("qfloer-complex v9\ntruncation 4 integer\nend\n"),
            Err(NovError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse("qfloer-complex v1\ntruncation 4 integer\ngen a class 0 u -\n"),
            Err(NovError::Parse { .. })
        ));
        assert!(matches!(
            parse("qfloer-complex v1\ntruncation 4 integer\nd 0 1 1\nend\n"),
            Err(NovError::Parse { line: 3, .. })
        ));
        let too_many = "qfloer-complex v1\ntruncation 1 integer\n\
                        gen a class 0 u -\ngen b class 0 u -\nd 0 1 1,2,3\nend\n";
        assert!(matches!(parse(too_many), Err(NovError::Parse { line: 5, .. })));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# header comment\nqfloer-complex v1\n\ntruncation 2 mod2\n\
                    # a generator\ngen a class 0 u -\nend\n";
        let c = parse(text).unwrap();
        assert_eq!(c.len(), 1);
        assert!(c.tr.mod2);
    }
}
