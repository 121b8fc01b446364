//! Deterministic serialization of the crate's artifacts: series exports,
//! encounter reports, trajectory tables, and verification reports.
//!
//! # Byte determinism
//!
//! Every writer in this module produces output that depends only on the
//! values written — floats are formatted with a fixed 17-significant-digit
//! scientific notation ([`fmt_float`]), object keys appear in a fixed
//! order, and no timestamps or environment data are embedded. Two runs
//! with the same inputs produce byte-identical files, which is what makes
//! the replayable verification contract checkable with a plain byte
//! comparison.
//!
//! 17 significant digits round-trip every finite `f64` exactly, so all
//! readers recover the written values bit-for-bit (`parse ∘ write = id`).
//!
//! # Formats
//!
//! * **Series JSON** — `{"params": {"mu": …, "E": …, "kappa": …, "nu":
//!   [4]}, "order": N, "coeffs": [{"exp": [i1,i2,i3,i4], "val": …}, …]}`
//!   with coefficients sorted by graded-lexicographic exponent rank and
//!   exact zeros omitted ([`series_json`] / [`series_from_json`]). The
//!   planar variant replaces `"nu"` with `"alpha"` and uses length-2
//!   exponents ([`planar_series_json`]).
//! * **Encounter JSON** — `{"entry": [6], "exit": [6], "nu0": [4], "n0":
//!   [4], "s_exit": …, "t_exit": …, "diagnostics": {…}}`, optionally
//!   extended with `"oracle_deviation"` when a reference integration was
//!   requested ([`encounter_json`] / [`encounter_from_json`]).
//! * **Trajectory CSV** — header `s,t,u1,…,U4,K,l,nu1..nu4` for
//!   regularized runs ([`ks_csv`]), `t,X,Y,Z,PX,PY,PZ,H` for Cartesian
//!   runs ([`cart_csv`]).
//!
//! The verification-report JSON lives with its builder in
//! [`crate::verify`]; it uses the same float formatter.

use serde::Deserialize;

use crate::canonical::EncounterResult;
use crate::error::{Error, Result};
use crate::hjsolver::HjSolution;
use crate::Series;

// ---------------------------------------------------------------------------
// Float formatting
// ---------------------------------------------------------------------------

/// Formats a finite `f64` with 17 significant digits in scientific
/// notation (`-1.2345678901234567e-3`). This is the single float format
/// used by every artifact writer.
///
/// # Errors
/// [`Error::NonFinite`] for NaN or infinities — artifacts never contain
/// them.
pub fn fmt_float(x: f64, context: &str) -> Result<String> {
    if !x.is_finite() {
        return Err(Error::NonFinite {
            context: format!("{context} (serialization)"),
        });
    }
    Ok(format!("{x:.16e}"))
}

fn float_list(values: &[f64], context: &str) -> Result<String> {
    let mut parts = Vec::with_capacity(values.len());
    for v in values {
        parts.push(fmt_float(*v, context)?);
    }
    Ok(format!("[{}]", parts.join(", ")))
}

// ---------------------------------------------------------------------------
// Series JSON
// ---------------------------------------------------------------------------

fn coeffs_block(series: &Series, context: &str) -> Result<String> {
    let basis = series.basis();
    let mut entries = Vec::new();
    // Dense storage is already graded-lex rank order; exact zeros are
    // omitted (they carry no information and the reader re-creates them).
    for rank in 0..basis.len() {
        let c = series.coeff_at(rank);
        if c == 0.0 {
            continue;
        }
        let exp = basis.exponent(rank);
        let exp_str = exp
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(",");
        entries.push(format!(
            "    {{\"exp\": [{exp_str}], \"val\": {}}}",
            fmt_float(c, context)?
        ));
    }
    Ok(entries.join(",\n"))
}

/// Serializes a complete-integral solve: problem parameters, truncation
/// order, and the nonzero coefficients of `W(u; ν)` in graded-lex order.
///
/// # Errors
/// [`Error::NonFinite`] if any written value is not finite.
pub fn series_json(sol: &HjSolution) -> Result<String> {
    let p = &sol.params;
    Ok(format!(
        "{{\n  \"params\": {{\"mu\": {}, \"E\": {}, \"kappa\": {}, \"nu\": {}}},\n  \"order\": {},\n  \"coeffs\": [\n{}\n  ]\n}}\n",
        fmt_float(p.mu, "series params.mu")?,
        fmt_float(p.energy, "series params.E")?,
        fmt_float(p.kappa, "series params.kappa")?,
        float_list(&p.nu, "series params.nu")?,
        sol.order,
        coeffs_block(&sol.w, "series coefficient")?
    ))
}

/// Serializes a planar generating series `W₂(u; κ, α)`: same layout as
/// [`series_json`] with `"alpha"` in place of `"nu"` and length-2
/// exponents.
///
/// # Errors
/// As [`series_json`].
pub fn planar_series_json(
    mu: f64,
    energy: f64,
    kappa: f64,
    alpha: f64,
    order: usize,
    w2: &Series,
) -> Result<String> {
    Ok(format!(
        "{{\n  \"params\": {{\"mu\": {}, \"E\": {}, \"kappa\": {}, \"alpha\": {}}},\n  \"order\": {},\n  \"coeffs\": [\n{}\n  ]\n}}\n",
        fmt_float(mu, "series params.mu")?,
        fmt_float(energy, "series params.E")?,
        fmt_float(kappa, "series params.kappa")?,
        fmt_float(alpha, "series params.alpha")?,
        order,
        coeffs_block(w2, "series coefficient")?
    ))
}

/// Parameter block of a parsed series file.
#[derive(Debug, Clone, Deserialize)]
pub struct SeriesParamsFile {
    /// Mass ratio.
    pub mu: f64,
    /// Energy level.
    #[serde(rename = "E")]
    pub energy: f64,
    /// Spectral shift.
    pub kappa: f64,
    /// Asymptote parameter (spatial files).
    #[serde(default)]
    pub nu: Option<[f64; 4]>,
    /// Rotation angle (planar files).
    #[serde(default)]
    pub alpha: Option<f64>,
}

/// One coefficient entry of a parsed series file.
#[derive(Debug, Clone, Deserialize)]
pub struct SeriesCoeffFile {
    /// Exponent tuple (length 4 spatial, 2 planar).
    pub exp: Vec<u16>,
    /// Coefficient value.
    pub val: f64,
}

/// A parsed series artifact.
#[derive(Debug, Clone, Deserialize)]
pub struct SeriesFile {
    /// Problem parameters.
    pub params: SeriesParamsFile,
    /// Truncation order.
    pub order: usize,
    /// Nonzero coefficients in graded-lex order.
    pub coeffs: Vec<SeriesCoeffFile>,
}

impl SeriesFile {
    /// Rebuilds the dense series from the sparse coefficient list.
    ///
    /// # Errors
    /// [`Error::Parse`] when exponent lengths are inconsistent;
    /// [`Error::DegreeOutOfRange`] when an exponent exceeds the stated
    /// order.
    pub fn to_series(&self) -> Result<Series> {
        let nvars = match self.coeffs.first() {
            Some(c) => c.exp.len(),
            None => 4,
        };
        if !(nvars == 2 || nvars == 4) {
            return Err(Error::Parse(format!(
                "series file: unsupported exponent length {nvars}"
            )));
        }
        let basis = crate::algebra::basis(nvars, self.order)?;
        let mut s = Series::zeros(basis);
        for c in &self.coeffs {
            if c.exp.len() != nvars {
                return Err(Error::Parse(
                    "series file: mixed exponent lengths".into(),
                ));
            }
            s.set_coeff(&c.exp, c.val)?;
        }
        Ok(s)
    }
}

/// Parses a series artifact written by [`series_json`] or
/// [`planar_series_json`].
///
/// # Errors
/// [`Error::Json`] on malformed JSON.
pub fn series_from_json(text: &str) -> Result<SeriesFile> {
    Ok(serde_json::from_str(text)?)
}

// ---------------------------------------------------------------------------
// Encounter JSON
// ---------------------------------------------------------------------------

/// Serializes an encounter-map result, optionally appending the deviation
/// against a direct reference integration.
///
/// # Errors
/// [`Error::NonFinite`] if any written value is not finite.
pub fn encounter_json(res: &EncounterResult, oracle_deviation: Option<f64>) -> Result<String> {
    let mut tail = String::new();
    if let Some(dev) = oracle_deviation {
        tail = format!(
            ",\n  \"oracle_deviation\": {}",
            fmt_float(dev, "encounter oracle_deviation")?
        );
    }
    Ok(format!(
        "{{\n  \"entry\": {},\n  \"exit\": {},\n  \"nu0\": {},\n  \"n0\": {},\n  \"s_exit\": {},\n  \"t_exit\": {},\n  \"diagnostics\": {{\"nu_drift\": {}, \"energy_drift\": {}, \"bilinear\": {}, \"newton_iters_max\": {}}}{tail}\n}}\n",
        float_list(&res.entry.to_array(), "encounter entry")?,
        float_list(&res.exit.to_array(), "encounter exit")?,
        float_list(&res.nu0, "encounter nu0")?,
        float_list(&res.n0, "encounter n0")?,
        fmt_float(res.s_exit, "encounter s_exit")?,
        fmt_float(res.t_exit, "encounter t_exit")?,
        fmt_float(res.diagnostics.nu_drift, "encounter nu_drift")?,
        fmt_float(res.diagnostics.energy_drift, "encounter energy_drift")?,
        fmt_float(res.diagnostics.bilinear, "encounter bilinear")?,
        res.diagnostics.newton_iters_max,
    ))
}

/// Diagnostics block of a parsed encounter report.
#[derive(Debug, Clone, Deserialize)]
pub struct EncounterDiagnosticsFile {
    /// Drift of `ν̂` along the march.
    pub nu_drift: f64,
    /// Drift of the regularized Hamiltonian.
    pub energy_drift: f64,
    /// Largest `|ℓ(u, U)|` seen.
    pub bilinear: f64,
    /// Worst Newton iteration count.
    pub newton_iters_max: usize,
}

/// A parsed encounter report.
#[derive(Debug, Clone, Deserialize)]
pub struct EncounterFile {
    /// Entry state `(X, Y, Z, P_X, P_Y, P_Z)`.
    pub entry: [f64; 6],
    /// Exit state in the same layout.
    pub exit: [f64; 6],
    /// Asymptote parameter at entry.
    pub nu0: [f64; 4],
    /// Conjugate coordinate at entry.
    pub n0: [f64; 4],
    /// Exit proper time.
    pub s_exit: f64,
    /// Exit physical time.
    pub t_exit: f64,
    /// March diagnostics.
    pub diagnostics: EncounterDiagnosticsFile,
    /// Deviation against direct integration, when requested.
    #[serde(default)]
    pub oracle_deviation: Option<f64>,
}

/// Parses an encounter report written by [`encounter_json`].
///
/// # Errors
/// [`Error::Json`] on malformed JSON.
pub fn encounter_from_json(text: &str) -> Result<EncounterFile> {
    Ok(serde_json::from_str(text)?)
}

// ---------------------------------------------------------------------------
// Trajectory CSV
// ---------------------------------------------------------------------------

/// One row of a regularized-trajectory table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsCsvRow {
    /// Proper time.
    pub s: f64,
    /// Physical time `t(s)`.
    pub t: f64,
    /// KS position.
    pub u: [f64; 4],
    /// KS momentum.
    pub p: [f64; 4],
    /// Regularized Hamiltonian value.
    pub k: f64,
    /// Bilinear invariant `ℓ(u, U)`.
    pub l: f64,
    /// Asymptote parameter `ν̂(u, U)` at the sample.
    pub nu: [f64; 4],
}

/// Header of the regularized-trajectory CSV.
pub const KS_CSV_HEADER: &str = "s,t,u1,u2,u3,u4,U1,U2,U3,U4,K,l,nu1,nu2,nu3,nu4";

/// Header of the Cartesian-trajectory CSV.
pub const CART_CSV_HEADER: &str = "t,X,Y,Z,PX,PY,PZ,H";

/// Writes a regularized trajectory as CSV (header [`KS_CSV_HEADER`]).
///
/// # Errors
/// [`Error::NonFinite`] if any value is not finite.
pub fn ks_csv(rows: &[KsCsvRow]) -> Result<String> {
    let mut out = String::from(KS_CSV_HEADER);
    out.push('\n');
    for row in rows {
        let mut vals = Vec::with_capacity(16);
        vals.push(row.s);
        vals.push(row.t);
        vals.extend_from_slice(&row.u);
        vals.extend_from_slice(&row.p);
        vals.push(row.k);
        vals.push(row.l);
        vals.extend_from_slice(&row.nu);
        let mut parts = Vec::with_capacity(vals.len());
        for v in vals {
            parts.push(fmt_float(v, "trajectory row")?);
        }
        out.push_str(&parts.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// One row of a Cartesian-trajectory table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartCsvRow {
    /// Physical time.
    pub t: f64,
    /// State `(X, Y, Z, P_X, P_Y, P_Z)`.
    pub state: [f64; 6],
    /// Hamiltonian value at the sample.
    pub h: f64,
}

/// Writes a Cartesian trajectory as CSV (header [`CART_CSV_HEADER`]).
///
/// # Errors
/// [`Error::NonFinite`] if any value is not finite.
pub fn cart_csv(rows: &[CartCsvRow]) -> Result<String> {
    let mut out = String::from(CART_CSV_HEADER);
    out.push('\n');
    for row in rows {
        let mut vals = Vec::with_capacity(8);
        vals.push(row.t);
        vals.extend_from_slice(&row.state);
        vals.push(row.h);
        let mut parts = Vec::with_capacity(vals.len());
        for v in vals {
            parts.push(fmt_float(v, "trajectory row")?);
        }
        out.push_str(&parts.join(","));
        out.push('\n');
    }
    Ok(out)
}

fn parse_row(line: &str, expect: usize, lineno: usize) -> Result<Vec<f64>> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != expect {
        return Err(Error::Parse(format!(
            "CSV line {lineno}: expected {expect} fields, found {}",
            fields.len()
        )));
    }
    let mut vals = Vec::with_capacity(expect);
    for f in fields {
        vals.push(
            f.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("CSV line {lineno}: {e}")))?,
        );
    }
    Ok(vals)
}

/// Parses a regularized-trajectory CSV written by [`ks_csv`].
///
/// # Errors
/// [`Error::Parse`] on a bad header, field count, or numeric literal.
pub fn ks_csv_parse(text: &str) -> Result<Vec<KsCsvRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == KS_CSV_HEADER => {}
        other => {
            return Err(Error::Parse(format!(
                "regularized CSV: bad header {other:?}"
            )))
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let v = parse_row(line, 16, i + 2)?;
        rows.push(KsCsvRow {
            s: v[0],
            t: v[1],
            u: [v[2], v[3], v[4], v[5]],
            p: [v[6], v[7], v[8], v[9]],
            k: v[10],
            l: v[11],
            nu: [v[12], v[13], v[14], v[15]],
        });
    }
    Ok(rows)
}

/// Parses a Cartesian-trajectory CSV written by [`cart_csv`].
///
/// # Errors
/// As [`ks_csv_parse`].
pub fn cart_csv_parse(text: &str) -> Result<Vec<CartCsvRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CART_CSV_HEADER => {}
        other => return Err(Error::Parse(format!("Cartesian CSV: bad header {other:?}"))),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let v = parse_row(line, 8, i + 2)?;
        rows.push(CartCsvRow {
            t: v[0],
            state: [v[1], v[2], v[3], v[4], v[5], v[6]],
            h: v[7],
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::encounter_map;
    use crate::hjsolver::HjSolver;
    use crate::kscore::types::Params;
    use crate::sampling;

    #[test]
    fn float_format_round_trips_exactly() {
        let xs = [
            0.0,
            -0.0,
            1.0,
            -1.8,
            0.01,
            std::f64::consts::PI,
            2.2250738585072014e-308,
            1.7976931348623157e308,
            (8.0f64 * 0.01).sqrt(),
        ];
        for &x in &xs {
            let s = fmt_float(x, "test").unwrap();
            let back: f64 = s.parse().unwrap();
            assert!(back == x || (back == 0.0 && x == 0.0), "{x} -> {s} -> {back}");
        }
        assert!(fmt_float(f64::NAN, "test").is_err());
        assert!(fmt_float(f64::INFINITY, "test").is_err());
    }

    #[test]
    fn series_export_round_trips_and_orders_coefficients() {
        let solver = HjSolver::new(Params::new(0.01, -1.8).unwrap(), 6).unwrap();
        let sol = solver.complete_integral(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        let text = series_json(&sol).unwrap();
        let file = series_from_json(&text).unwrap();
        assert_eq!(file.order, 6);
        assert_eq!(file.params.nu, Some([1.0, 0.0, 0.0, 0.0]));
        // Graded-lex rank order means ranks strictly increase.
        let basis = sol.w.basis();
        let mut last = None;
        for c in &file.coeffs {
            let rank = basis.rank_of(&c.exp).unwrap();
            assert!(last.map_or(true, |l| rank > l), "ranks not increasing");
            last = Some(rank);
        }
        // And the rebuilt series is coefficient-identical.
        let rebuilt = file.to_series().unwrap();
        for rank in 0..basis.len() {
            assert_eq!(rebuilt.coeff_at(rank), sol.w.coeff_at(rank));
        }
    }

    #[test]
    fn encounter_export_round_trips() {
        let solver = HjSolver::new(Params::new(0.01, -1.8).unwrap(), 8).unwrap();
        let mut rng = sampling::rng_for(77, 0);
        let entry = sampling::random_entry_state(&mut rng, 0.01, -1.8, 1e-3).unwrap();
        let res = encounter_map(&solver, &entry, 1e-3).unwrap();
        let text = encounter_json(&res, Some(3.25e-8)).unwrap();
        let file = encounter_from_json(&text).unwrap();
        assert_eq!(file.entry, res.entry.to_array());
        assert_eq!(file.exit, res.exit.to_array());
        assert_eq!(file.nu0, res.nu0);
        assert_eq!(file.n0, res.n0);
        assert_eq!(file.s_exit, res.s_exit);
        assert_eq!(file.t_exit, res.t_exit);
        assert_eq!(file.diagnostics.newton_iters_max, res.diagnostics.newton_iters_max);
        assert_eq!(file.oracle_deviation, Some(3.25e-8));
        // Without the optional field the key is absent.
        let plain = encounter_json(&res, None).unwrap();
        assert!(!plain.contains("oracle_deviation"));
        assert_eq!(encounter_from_json(&plain).unwrap().oracle_deviation, None);
    }

    #[test]
    fn trajectory_tables_round_trip() {
        let row = KsCsvRow {
            s: 0.25,
            t: 1.5e-3,
            u: [0.01, -0.02, 0.03, -0.04],
            p: [0.1, 0.2, -0.3, 0.4],
            k: 1.0e-14,
            l: -2.0e-16,
            nu: [0.5, 0.5, -0.5, 0.5],
        };
        let text = ks_csv(&[row]).unwrap();
        let rows = ks_csv_parse(&text).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0], row);

        let crow = CartCsvRow {
            t: 0.125,
            state: [1e-3, -2e-3, 3e-3, 0.4, -0.5, 0.6],
            h: -1.8,
        };
        let ctext = cart_csv(&[crow]).unwrap();
        let crows = cart_csv_parse(&ctext).unwrap();
        assert_eq!(crows.len(), 1);
        assert_eq!(crows[0], crow);

        // Malformed inputs surface as parse errors.
        assert!(ks_csv_parse("nonsense\n1,2").is_err());
        assert!(cart_csv_parse(&format!("{CART_CSV_HEADER}\n1,2,3")).is_err());
    }

    #[test]
    fn writers_are_byte_deterministic() {
        let solver = HjSolver::new(Params::new(0.01, -1.8).unwrap(), 4).unwrap();
        let nu = [0.6, -0.48, 0.5, -0.4];
        let a = series_json(&solver.complete_integral(&nu).unwrap()).unwrap();
        let b = series_json(&solver.complete_integral(&nu).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
