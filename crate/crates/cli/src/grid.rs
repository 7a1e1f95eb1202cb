//! Value-list arguments: `start:stop:step` ranges or comma-separated lists.

/// Longest list a range argument may expand to.
const MAX_POINTS: usize = 1_000_000;

/// Parses `a:b:c` (inclusive of `b` when it lies on the grid) or `v1,v2,...`.
pub fn parse_values(spec: &str) -> Result<Vec<f64>, String> {
    let spec = spec.trim();
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("range {spec:?} must have the form start:stop:step"));
        }
        let [start, stop, step] = [parts[0], parts[1], parts[2]].map(number);
        let (start, stop, step) = (start?, stop?, step?);
        if step == 0.0 || (stop - start) * step < 0.0 {
            return Err(format!("step of {spec:?} does not lead from start to stop"));
        }
        let span = (stop - start) / step;
        if span >= MAX_POINTS as f64 {
            return Err(format!("range {spec:?} has too many points"));
        }
        let count = (span + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|i| tidy(start + i as f64 * step)).collect())
    } else {
        let values = spec.split(',').map(number).collect::<Result<Vec<_>, _>>()?;
        if values.is_empty() {
            return Err("empty value list".into());
        }
        Ok(values)
    }
}

fn number(text: &str) -> Result<f64, String> {
    let text = text.trim();
    text.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("{text:?} is not a finite number"))
}

/// Removes accumulated representation noise (`0.1 + 2 * 0.1`).
fn tidy(v: f64) -> f64 {
    let rounded = (v * 1e12).round() / 1e12;
    if (rounded - v).abs() <= 1e-12 * v.abs().max(1.0) {
        rounded
    } else {
        v
    }
}
