//! Per-dimension allocation reports and SLB curve emission.

use mlstc::slb::{self, SlbPoint};

use crate::CliError;

/// CSV comparing the single-layer ternary allocation at a threshold against
/// the reverse water-filling optimum at a matched distortion.
///
/// Columns: `dim,sigma_sq,stc_rate,stc_distortion,wf_rate,wf_distortion`.
/// When `target_distortion` is `None` the water-filling side is matched to
/// the ternary layer's own mean distortion.
pub fn allocation_report_csv(
    spectrum_sq: &[f64],
    lambda: f64,
    target_distortion: Option<f64>,
) -> Result<String, CliError> {
    let stc = slb::single_layer_allocation(spectrum_sq, lambda)?;
    let n = spectrum_sq.len() as f64;
    let stc_mean_distortion: f64 = stc.iter().map(|a| a.1).sum::<f64>() / n;
    let target = target_distortion.unwrap_or(stc_mean_distortion);
    let wf = slb::waterfill(spectrum_sq, target)?;

    let mut out = String::from("dim,sigma_sq,stc_rate,stc_distortion,wf_rate,wf_distortion\n");
    for (i, &s2) in spectrum_sq.iter().enumerate() {
        out.push_str(&format!(
            "{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}\n",
            i, s2, stc[i].0, stc[i].1, wf.per_dim_rate[i], wf.per_dim_distortion[i]
        ));
    }
    Ok(out)
}

/// CSV of the Shannon Lower Bound over a rate grid: `rate,distortion`.
pub fn slb_csv(spectrum_sq: &[f64], rate_grid: &[f64]) -> Result<String, CliError> {
    let points: Vec<SlbPoint> = slb::slb_curve(spectrum_sq, rate_grid)?;
    let mut out = String::from("rate,distortion\n");
    for p in &points {
        out.push_str(&format!("{:.12e},{:.12e}\n", p.rate, p.distortion));
    }
    Ok(out)
}
