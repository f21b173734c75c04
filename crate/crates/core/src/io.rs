//! Plain-text space and field files.
//!
//! Space files start with a header line of `key=value` pairs:
//!
//! ```text
//! mode=coords metric=euclidean dim=1 cap=2
//! 0 -1 0.5
//! 1 -0.5 0.5
//! ```
//!
//! Coordinate files list `id x1 .. xD weight` per line. Matrix files
//! (`mode=matrix cap=R`) list the `n` rows of the distance matrix followed by
//! one line of weights. Lines starting with `#` form the truncation note.
//! Optional header keys `kind=` and `edges=x,y;x,y` restore the space kind and
//! its truncation sites. Field files list `id value` per line.
//!
//! Numbers are written in shortest round-trip form, so a written file reads
//! back bit for bit.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::maxop::MaxField;
use crate::norms::{GradientCertificate, SeminormResult, Witness};
use crate::regularity::{DecayFit, FitWitness};
use crate::space::{MetricKind, MetricMeasureSpace, MetricSpec, SpaceKind};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn num(token: &str, line: usize) -> Result<f64> {
    token.parse().map_err(|_| parse_err(line, format!("not a number: '{token}'")))
}

fn kind_name(kind: SpaceKind) -> String {
    kind.to_string()
}

fn parse_kind(s: &str, line: usize) -> Result<SpaceKind> {
    Ok(match s {
        "generic" => SpaceKind::Generic,
        "buckley" => SpaceKind::Buckley { weighted: false },
        "buckley-weighted" => SpaceKind::Buckley { weighted: true },
        "cross" => SpaceKind::Cross,
        other => match other.strip_prefix("grid").and_then(|r| r.strip_suffix('d')) {
            Some(d) => SpaceKind::Grid { dim: d.parse().map_err(|_| parse_err(line, format!("bad kind '{other}'")))? },
            None => return Err(parse_err(line, format!("unknown kind '{other}'"))),
        },
    })
}

fn format_sites(sites: &[Vec<f64>]) -> String {
    sites.iter().map(|s| s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")).collect::<Vec<_>>().join(";")
}

pub fn write_space<W: Write>(space: &MetricMeasureSpace, mut out: W) -> Result<()> {
    let metric = space.metric();
    let mut header = match metric.kind {
        MetricKind::Matrix => format!("mode=matrix cap={}", space.cap()),
        kind => format!(
            "mode=coords metric={} dim={} cap={}",
            kind.name(),
            metric.dimension.expect("coordinate metrics carry a dimension"),
            space.cap()
        ),
    };
    if space.kind() != SpaceKind::Generic {
        header.push_str(&format!(" kind={}", kind_name(space.kind())));
    }
    if !space.truncation_sites().is_empty() {
        header.push_str(&format!(" edges={}", format_sites(space.truncation_sites())));
    }
    writeln!(out, "{header}")?;
    for line in space.truncation_note().lines() {
        writeln!(out, "# {line}")?;
    }
    let n = space.len();
    if metric.kind == MetricKind::Matrix {
        for a in 0..n {
            let row: Vec<String> = (0..n).map(|b| space.distance(a, b).to_string()).collect();
            writeln!(out, "{}", row.join(" "))?;
        }
        let w: Vec<String> = space.weights().iter().map(|w| w.to_string()).collect();
        writeln!(out, "{}", w.join(" "))?;
    } else {
        for id in 0..n {
            let c: Vec<String> = space.coords(id).expect("coordinate space").iter().map(|v| v.to_string()).collect();
            writeln!(out, "{id} {} {}", c.join(" "), space.weight(id))?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn save_space(space: &MetricMeasureSpace, path: &Path) -> Result<()> {
    write_space(space, BufWriter::new(File::create(path)?))
}

pub fn read_space<R: Read>(input: R) -> Result<MetricMeasureSpace> {
    let mut lines = Vec::new();
    let mut notes = Vec::new();
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if let Some(note) = t.strip_prefix('#') {
            notes.push(note.trim().to_string());
        } else if !t.is_empty() {
            lines.push((i + 1, t.to_string()));
        }
    }
    let Some((hline, header)) = lines.first().cloned() else {
        return Err(parse_err(1, "missing header line"));
    };
    let mut keys = BTreeMap::new();
    for pair in header.split_whitespace() {
        let (k, v) =
            pair.split_once('=').ok_or_else(|| parse_err(hline, format!("expected key=value, got '{pair}'")))?;
        keys.insert(k.to_string(), v.to_string());
    }
    let get = |k: &str| keys.get(k).ok_or_else(|| parse_err(hline, format!("header lacks '{k}'")));
    let cap = num(get("cap")?, hline)?;
    let body = &lines[1..];
    let space = match get("mode")?.as_str() {
        "coords" => {
            let dim: usize = get("dim")?.parse().map_err(|_| parse_err(hline, "bad dim"))?;
            let metric = match get("metric")?.as_str() {
                "euclidean" => MetricSpec::euclidean(dim),
                "chebyshev" => MetricSpec::chebyshev(dim),
                other => return Err(parse_err(hline, format!("unknown metric '{other}'"))),
            };
            let mut rows: Vec<Option<(Vec<f64>, f64)>> = vec![None; body.len()];
            for (ln, text) in body {
                let tokens: Vec<&str> = text.split_whitespace().collect();
                if tokens.len() != dim + 2 {
                    return Err(parse_err(*ln, format!("expected {} fields, found {}", dim + 2, tokens.len())));
                }
                let id: usize = tokens[0].parse().map_err(|_| parse_err(*ln, format!("bad id '{}'", tokens[0])))?;
                if id >= rows.len() || rows[id].is_some() {
                    return Err(parse_err(*ln, format!("id {id} out of range or repeated")));
                }
                let coords = tokens[1..=dim].iter().map(|t| num(t, *ln)).collect::<Result<Vec<_>>>()?;
                rows[id] = Some((coords, num(tokens[dim + 1], *ln)?));
            }
            let (coords, weights): (Vec<_>, Vec<_>) = rows.into_iter().map(|r| r.expect("ids are dense")).unzip();
            MetricMeasureSpace::from_coords(coords, metric, weights, cap)?
        }
        "matrix" => {
            let Some(((_, wline), rows)) = body.split_last() else {
                return Err(parse_err(hline, "matrix file has no rows"));
            };
            let matrix = rows
                .iter()
                .map(|(ln, t)| t.split_whitespace().map(|v| num(v, *ln)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            let wl = body.last().map(|b| b.0).unwrap_or(hline);
            let weights = wline.split_whitespace().map(|v| num(v, wl)).collect::<Result<Vec<_>>>()?;
            MetricMeasureSpace::from_matrix(matrix, weights, cap)?
        }
        other => return Err(parse_err(hline, format!("unknown mode '{other}'"))),
    };
    let mut space = space.with_note(notes.join("\n"));
    if let Some(k) = keys.get("kind") {
        space = space.with_kind(parse_kind(k, hline)?);
    }
    if let Some(edges) = keys.get("edges") {
        let sites = edges
            .split(';')
            .map(|s| s.split(',').map(|v| num(v, hline)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        space = space.with_truncation_sites(sites)?;
    }
    Ok(space)
}

pub fn load_space(path: &Path) -> Result<MetricMeasureSpace> {
    read_space(File::open(path)?)
}

pub fn write_field<W: Write>(field: &ScalarField, mut out: W) -> Result<()> {
    for (id, v) in field.values().iter().enumerate() {
        writeln!(out, "{id} {v}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn save_field(field: &ScalarField, path: &Path) -> Result<()> {
    write_field(field, BufWriter::new(File::create(path)?))
}

pub fn read_field<R: Read>(input: R) -> Result<ScalarField> {
    let mut rows: Vec<(usize, usize, f64)> = Vec::new();
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let mut it = t.split_whitespace();
        let (Some(id), Some(v), None) = (it.next(), it.next(), it.next()) else {
            return Err(parse_err(i + 1, "expected 'id value'"));
        };
        let id = id.parse().map_err(|_| parse_err(i + 1, format!("bad id '{id}'")))?;
        rows.push((id, i + 1, num(v, i + 1)?));
    }
    let mut values = vec![None; rows.len()];
    for (id, ln, v) in rows {
        if id >= values.len() || values[id].is_some() {
            return Err(parse_err(ln, format!("id {id} out of range or repeated")));
        }
        values[id] = Some(v);
    }
    ScalarField::new(values.into_iter().map(|v| v.expect("ids are dense")).collect())
}

pub fn load_field(path: &Path) -> Result<ScalarField> {
    read_field(File::open(path)?)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

/// Per-point CSV of a maximal function: `id,value,argmax_radius,argmax_center,truncated`.
pub fn write_max_field_csv<W: Write>(m: &MaxField, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["id", "value", "argmax_radius", "argmax_center", "truncated"])?;
    for i in 0..m.len() {
        w.write_record([
            i.to_string(),
            m.values[i].to_string(),
            m.argmax_radius[i].to_string(),
            m.argmax_center[i].to_string(),
            m.truncated[i].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn witness_fields(w: &Witness) -> [String; 3] {
    match *w {
        Witness::Ball { center, radius } => ["ball".into(), center.to_string(), radius.to_string()],
        Witness::Pair { a, b } => ["pair".into(), a.to_string(), b.to_string()],
        Witness::None => ["none".into(), String::new(), String::new()],
    }
}

pub fn write_seminorm_csv<W: Write>(r: &SeminormResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "family",
        "p",
        "beta",
        "s",
        "value",
        "witness",
        "witness_a",
        "witness_b",
        "scanned",
        "truncated",
        "at_min_radius",
        "notes",
    ])?;
    let [kind, a, b] = witness_fields(&r.witness);
    w.write_record([
        r.family.name().to_string(),
        opt(r.params.p),
        opt(r.params.beta),
        opt(r.params.s),
        r.value.to_string(),
        kind,
        a,
        b,
        r.scanned.to_string(),
        r.truncated.to_string(),
        r.at_min_radius.to_string(),
        r.notes.join("; "),
    ])?;
    w.flush()?;
    Ok(())
}

pub fn write_certificate_csv<W: Write>(c: &GradientCertificate, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["s", "C", "violation_ratio", "fitted_constant", "witness_a", "witness_b", "passes"])?;
    let (a, b) = c.witness.map_or((String::new(), String::new()), |(a, b)| (a.to_string(), b.to_string()));
    w.write_record([
        c.s.to_string(),
        c.constant.to_string(),
        c.violation_ratio.to_string(),
        c.fitted_constant.to_string(),
        a,
        b,
        c.passes.to_string(),
    ])?;
    w.flush()?;
    Ok(())
}

fn fit_witness_fields(w: Option<&FitWitness>) -> [String; 5] {
    match w {
        None => Default::default(),
        Some(w) => [
            w.center.to_string(),
            w.radius.to_string(),
            opt(w.thickness),
            w.ball.map_or_else(String::new, |b| b.0.to_string()),
            opt(w.ball.map(|b| b.1)),
        ],
    }
}

/// One-row CSV of a regularity fit. `witness_*` locate the sample attaining
/// the constant, `limiting_*` the sample bounding the exponent.
pub fn write_fit_csv<W: Write>(fit: &DecayFit, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ["variant", "C", "exponent"].map(String::from).to_vec();
    for prefix in ["witness", "limiting"] {
        for field in ["center", "radius", "thickness", "ball_center", "ball_radius"] {
            header.push(format!("{prefix}_{field}"));
        }
    }
    header.extend(["samples", "residual", "envelope_slope"].map(String::from));
    w.write_record(&header)?;
    let mut row = vec![fit.variant.name().to_string(), fit.constant.to_string(), fit.exponent.to_string()];
    row.extend(fit_witness_fields(fit.worst_witness.as_ref()));
    row.extend(fit_witness_fields(fit.limiting_witness.as_ref()));
    row.extend([fit.samples.to_string(), fit.residual.to_string(), opt(fit.envelope_slope)]);
    w.write_record(&row)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{buckley_space, cross_space};

    fn roundtrip(space: &MetricMeasureSpace) -> MetricMeasureSpace {
        let mut buf = Vec::new();
        write_space(space, &mut buf).unwrap();
        read_space(buf.as_slice()).unwrap()
    }

    #[test]
    fn coords_roundtrip() {
        let s = buckley_space(2.5, 0.05, true).unwrap();
        let r = roundtrip(&s);
        assert_eq!(r.len(), s.len());
        assert_eq!(r.kind(), s.kind());
        assert_eq!(r.weights(), s.weights());
        assert_eq!(r.truncation_sites(), s.truncation_sites());
        assert_eq!(r.truncation_note(), s.truncation_note());
        for i in 0..s.len() {
            assert_eq!(r.coords(i), s.coords(i));
            assert_eq!(r.edge_distance(i), s.edge_distance(i));
        }
        let c = cross_space(3.0, 2.0, 0.05).unwrap();
        assert_eq!(roundtrip(&c).metric(), c.metric());
    }

    #[test]
    fn matrix_roundtrip() {
        let m = vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.5], vec![2.0, 1.5, 0.0]];
        let s = MetricMeasureSpace::from_matrix(m, vec![1.0, 2.0, 0.5], 3.0).unwrap();
        let r = roundtrip(&s);
        assert_eq!(r.distance(0, 2), 2.0);
        assert_eq!(r.weights(), &[1.0, 2.0, 0.5]);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(read_space("mode=coords metric=euclidean dim=1\n".as_bytes()), Err(Error::Parse { .. })));
        let bad = "mode=coords metric=euclidean dim=1 cap=1\n0 0.0\n";
        assert!(matches!(read_space(bad.as_bytes()), Err(Error::Parse { line: 2, .. })));
        let neg = "mode=coords metric=euclidean dim=1 cap=1\n0 0.0 -1\n";
        assert!(matches!(read_space(neg.as_bytes()), Err(Error::NonPositiveWeight { .. })));
        let asym = "mode=matrix cap=3\n0 1\n2 0\n1 1\n";
        assert!(matches!(read_space(asym.as_bytes()), Err(Error::AsymmetricMatrix { .. })));
    }

    #[test]
    fn fields() {
        let f = ScalarField::new(vec![0.1, -2.0, 1e-300]).unwrap();
        let mut buf = Vec::new();
        write_field(&f, &mut buf).unwrap();
        assert_eq!(read_field(buf.as_slice()).unwrap(), f);
        let shuffled = "1 5\n0 4\n";
        assert_eq!(read_field(shuffled.as_bytes()).unwrap().values(), &[4.0, 5.0]);
        assert!(read_field("0 1\n0 2\n".as_bytes()).is_err());
        assert!(read_field("0 nan\n".as_bytes()).is_err());
    }
}
