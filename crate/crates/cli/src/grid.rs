use crate::{CliError, CliResult};

/// Evenly spaced values of one coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Axis {
    fn value(&self, k: usize) -> f64 {
        if self.count == 1 {
            self.start
        } else {
            self.start + (self.stop - self.start) * k as f64 / (self.count - 1) as f64
        }
    }
}

/// Three coordinate axes; coordinates left out of the grid string are held at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    axes: [Axis; 3],
}

fn invalid(msg: String) -> CliError {
    CliError::Invalid(msg)
}

fn parse_axis(body: &str) -> CliResult<Axis> {
    let parts: Vec<&str> = body.split(':').collect();
    let [start, stop, count] = parts[..] else {
        return Err(invalid(format!("grid entry `{body}` is not start:stop:count")));
    };
    let number = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| invalid(format!("`{s}` is not a finite number")))
    };
    let count: usize = count
        .trim()
        .parse()
        .map_err(|_| invalid(format!("`{count}` is not a node count")))?;
    if count == 0 {
        return Err(invalid("grid has no nodes (count 0)".into()));
    }
    Ok(Axis {
        start: number(start)?,
        stop: number(stop)?,
        count,
    })
}

impl Grid {
    /// Parse `name=start:stop:count,...`; `names[k]` lists the accepted
    /// spellings of coordinate `k`.
    pub fn parse(text: &str, names: [&[&str]; 3]) -> CliResult<Self> {
        let mut axes: [Option<Axis>; 3] = [None, None, None];
        for entry in text.split(',').map(str::trim).filter(|e| !e.is_empty()) {
            let (name, body) = entry
                .split_once('=')
                .ok_or_else(|| invalid(format!("grid entry `{entry}` has no `=`")))?;
            let name = name.trim();
            let slot = names
                .iter()
                .position(|accepted| accepted.contains(&name))
                .ok_or_else(|| invalid(format!("unknown grid coordinate `{name}`; expected one of {names:?}")))?;
            if axes[slot].is_some() {
                return Err(invalid(format!("grid coordinate `{name}` given twice")));
            }
            axes[slot] = Some(parse_axis(body)?);
        }
        if axes.iter().all(Option::is_none) {
            return Err(invalid("empty grid specification".into()));
        }
        let fixed = || Axis { start: 0.0, stop: 0.0, count: 1 };
        Ok(Self {
            axes: axes.map(|a| a.unwrap_or_else(fixed)),
        })
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    /// Nodes in lexicographic order, the first coordinate varying slowest.
    pub fn nodes(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        let [a, b, c] = &self.axes;
        (0..a.count).flat_map(move |i| {
            (0..b.count).flat_map(move |j| (0..c.count).map(move |k| [a.value(i), b.value(j), c.value(k)]))
        })
    }
}
