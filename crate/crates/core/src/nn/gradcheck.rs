use super::{NnError, ParamStore};

/// A scalar function of a parameter store with an analytic gradient.
pub trait Objective {
    type Error: From<NnError>;

    fn loss(&self, params: &ParamStore) -> Result<f64, Self::Error>;
    fn loss_and_grad(&self, params: &ParamStore) -> Result<(f64, ParamStore), Self::Error>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub max_rel_error: f64,
    /// Parameter name and flat index of the worst entry.
    pub worst: Option<(String, usize)>,
    pub entries: usize,
}

/// Analytic and central-difference derivative of one parameter entry.
#[derive(Debug, Clone, PartialEq)]
pub struct GradEntry {
    pub name: String,
    pub index: usize,
    pub analytic: f64,
    pub numeric: f64,
}

impl GradEntry {
    /// `|a − n| / max(1e-8, |a| + |n|)`.
    pub fn rel_error(&self) -> f64 {
        (self.analytic - self.numeric).abs() / (self.analytic.abs() + self.numeric.abs()).max(1e-8)
    }
}

/// Every entry's analytic derivative next to `(f(θ+eps) − f(θ−eps)) / 2eps`,
/// in parameter-name order.
pub fn grad_entries<O: Objective + ?Sized>(
    objective: &O,
    params: &ParamStore,
    eps: f64,
) -> Result<Vec<GradEntry>, O::Error> {
    let (_, analytic) = objective.loss_and_grad(params)?;
    params.same_layout(&analytic)?;
    let mut probe = params.clone();
    let mut entries = Vec::with_capacity(params.num_entries());
    let names: Vec<String> = params.names().cloned().collect();
    for name in names {
        let len = params.get(&name)?.len();
        for i in 0..len {
            let original = params.get(&name)?.data()[i];
            probe.get_mut(&name)?.data_mut()[i] = original + eps;
            let plus = objective.loss(&probe)?;
            probe.get_mut(&name)?.data_mut()[i] = original - eps;
            let minus = objective.loss(&probe)?;
            probe.get_mut(&name)?.data_mut()[i] = original;
            entries.push(GradEntry {
                analytic: analytic.get(&name)?.data()[i],
                numeric: (plus - minus) / (2.0 * eps),
                name: name.clone(),
                index: i,
            });
        }
    }
    Ok(entries)
}

/// Maximum relative error of [`grad_entries`] over all parameters.
pub fn grad_check<O: Objective + ?Sized>(
    objective: &O,
    params: &ParamStore,
    eps: f64,
) -> Result<GradCheckReport, O::Error> {
    let entries = grad_entries(objective, params, eps)?;
    let mut report = GradCheckReport {
        max_rel_error: 0.0,
        worst: None,
        entries: entries.len(),
    };
    for e in entries {
        let rel = e.rel_error();
        if report.worst.is_none() || rel > report.max_rel_error {
            report.max_rel_error = rel;
            report.worst = Some((e.name, e.index));
        }
    }
    Ok(report)
}
