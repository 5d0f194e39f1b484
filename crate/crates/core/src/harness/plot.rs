//! Gnuplot scripts for experiment bundles. The script reads only the
//! bundle's CSV files and renders `plot.png` next to them.

use super::experiment::{Report, SERIES_FILE};
use crate::error::{Error, Result};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub const SCRIPT_FILE: &str = "plot.gp";

fn preamble(title: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set terminal pngcairo size 900,600\n\
         set output 'plot.png'\n\
         set title '{title}'\n\
         set grid\n"
    )
}

/// Writes `plot.gp` into `bundle` and returns its path.
pub fn emit_plots(bundle: &Path) -> Result<PathBuf> {
    let report = Report::read(bundle)?;
    let series = bundle.join(SERIES_FILE);
    let text = fs::read_to_string(&series)
        .map_err(|_| Error::MissingFile(series.display().to_string()))?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    if header.is_empty() || lines.next().is_none() {
        return Err(Error::EmptySeries(series.display().to_string()));
    }
    let columns = header.split(',').count();

    let mut s = String::new();
    match report.kind.as_str() {
        "forward_invariance" | "minimal_surface" | "epigraph" => {
            s.push_str(&preamble(&format!("sup P against t ({})", report.kind)));
            s.push_str("set xlabel 't'\nset ylabel 'sup P'\n");
            match report.tolerance {
                Some(tol) => {
                    let _ = writeln!(
                        s,
                        "plot '{SERIES_FILE}' using 1:2 with linespoints title 'sup P', {tol:e} with lines dashtype 2 title 'tolerance'"
                    );
                }
                None => {
                    let _ = writeln!(
                        s,
                        "plot '{SERIES_FILE}' using 1:2 with linespoints title 'sup P'"
                    );
                }
            }
        }
        "ancient_window" => {
            s.push_str(&preamble("(sup P at t = 0)+ against window length T"));
            s.push_str("set xlabel 'T'\nset ylabel '(sup P)+'\nset logscale x 2\n");
            let _ = writeln!(
                s,
                "plot for [i=2:{}] '{SERIES_FILE}' using 1:i with linespoints title columnheader(i)",
                columns
            );
        }
        "residuals" => {
            s.push_str(&preamble("minimum subsolution residual per snapshot pair"));
            s.push_str("set xlabel 't'\nset ylabel 'min R'\n");
            let _ = writeln!(
                s,
                "plot '{SERIES_FILE}' using 1:2 with lines title 'min R', '' using 1:(-$3) with lines dashtype 2 title '-tolerance'"
            );
        }
        "traveling_wave" => {
            s.push_str(&preamble("traveling-wave profile and tanh reference"));
            s.push_str("set xlabel 'xi'\nset ylabel 'u'\n");
            let _ = writeln!(
                s,
                "plot '{SERIES_FILE}' using 1:2 with lines linewidth 2 title 'computed', '' using 1:3 with lines dashtype 2 title 'tanh(xi/sqrt(2))'"
            );
        }
        "rigidity" => {
            // Columns: coordinates, then u, nu.
            let dim = columns - 2;
            s.push_str(&preamble("nu = H(u) over the grid"));
            if dim == 1 {
                s.push_str("set xlabel 'x0'\nset ylabel 'nu'\n");
                let _ = writeln!(s, "plot '{SERIES_FILE}' using 1:3 with points title 'nu'");
            } else {
                s.push_str("set xlabel 'x0'\nset ylabel 'x1'\nset zlabel 'nu'\n");
                let _ = writeln!(
                    s,
                    "splot '{SERIES_FILE}' using 1:2:{} with points pointsize 0.3 title 'nu'",
                    dim + 2
                );
            }
        }
        other => {
            return Err(Error::Format(format!(
                "unknown experiment kind `{other}` in report"
            )))
        }
    }
    let path = bundle.join(SCRIPT_FILE);
    fs::write(&path, s)?;
    Ok(path)
}
