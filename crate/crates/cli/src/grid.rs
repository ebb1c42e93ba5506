use std::fmt;

/// Malformed grid specification.
#[derive(Debug, Clone, PartialEq)]
pub struct GridError(pub String);

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "invalid grid `{}`: expected `start:step:end` or a comma list",
            self.0
        )
    }
}

impl std::error::Error for GridError {}

/// Parses `start:step:end` (inclusive) or `a,b,c`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, GridError> {
    let err = || GridError(spec.to_owned());
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(err)
    };
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [start, step, end] => {
            let (start, step, end) = (parse(start)?, parse(step)?, parse(end)?);
            if step <= 0.0 || end < start {
                return Err(err());
            }
            let count = ((end - start) / step + 1e-9).floor() as usize;
            Ok((0..=count).map(|i| start + i as f64 * step).collect())
        }
        [list] => list.split(',').map(parse).collect(),
        _ => Err(err()),
    }
}
