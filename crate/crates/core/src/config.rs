//! Product configuration files.
//!
//! Configs are TOML: a few global keys followed by one `[[product]]` table
//! per product. Demand statistics come either from an inline
//! `[product.stats]` table or, when absent, from the history CSV named by the
//! global `history` key (resolved relative to the config file).
//!
//! ```toml
//! seed = 42
//! replications = 1000
//! history = "history.csv"
//!
//! [[product]]
//! id = "Pr1"
//! purchase_cost = 12.0
//! selling_price = 16.10
//! ordering_cost = 1000.0
//! holding_rate = 0.20
//! size = 0.57
//! lead_time = 9
//! starting_stock = 2750
//! order_quantity = 4120
//! reorder_point = 4095
//! ```

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::demand::{
    estimate_stats, read_history, DemandModel, SizeDistribution, DEFAULT_TAIL_SHIFT,
    DEFAULT_TAIL_WEIGHT,
};
use crate::domain::{DemandStats, Policy, ProductSpec};
use crate::montecarlo::DEFAULT_REPLICATIONS;
use crate::optimize::SearchSpace;
use crate::policy::{ceil_units, ReplenishmentParams, DEFAULT_SAFETY_FACTOR};
use crate::{Error, Result, DAYS_PER_YEAR};

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub replications: Option<usize>,
    pub workers: Option<usize>,
    pub history: Option<PathBuf>,
    #[serde(rename = "product", default)]
    pub products: Vec<ProductEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DemandModelName {
    #[default]
    Lognormal,
    Normal,
    Mixture,
}

/// One `[[product]]` table as written in the file.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProductEntry {
    pub id: String,
    pub purchase_cost: f64,
    pub selling_price: f64,
    pub ordering_cost: f64,
    pub holding_rate: f64,
    pub size: f64,
    pub lead_time: u32,
    pub starting_stock: u64,
    pub safety_factor: Option<f64>,
    #[serde(default)]
    pub demand_model: DemandModelName,
    pub tail_weight: Option<f64>,
    pub tail_shift: Option<f64>,
    pub review_period: Option<u32>,
    pub order_quantity: Option<u64>,
    pub reorder_point: Option<u64>,
    pub r_bounds: Option<(u64, u64)>,
    pub q_bounds: Option<(u64, u64)>,
    pub stats: Option<DemandStats>,
}

/// A product with every optional setting resolved.
#[derive(Debug, Clone)]
pub struct Product {
    pub spec: ProductSpec,
    pub stats: DemandStats,
    pub distribution: SizeDistribution,
    pub safety_factor: f64,
    pub review_period: u32,
    pub order_quantity: u64,
    pub reorder_point: u64,
    pub r_bounds: Option<(u64, u64)>,
    pub q_bounds: Option<(u64, u64)>,
}

#[derive(Debug, Clone)]
pub struct Config {
    pub seed: Option<u64>,
    pub replications: usize,
    pub workers: Option<usize>,
    pub products: Vec<Product>,
}

/// Replenishment rules selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyKind {
    Periodic,
    PeriodicUpTo,
    Continuous,
    ContinuousRestore,
}

impl PolicyKind {
    pub fn name(&self) -> &'static str {
        match self {
            PolicyKind::Periodic => "periodic",
            PolicyKind::PeriodicUpTo => "periodic-up-to",
            PolicyKind::Continuous => "continuous",
            PolicyKind::ContinuousRestore => "continuous-restore",
        }
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "periodic" | "pq" => Ok(PolicyKind::Periodic),
            "periodic-up-to" => Ok(PolicyKind::PeriodicUpTo),
            "continuous" | "rq" => Ok(PolicyKind::Continuous),
            "continuous-restore" => Ok(PolicyKind::ContinuousRestore),
            other => Err(Error::invalid(format!("unknown policy `{other}`"))),
        }
    }
}

impl Product {
    pub fn demand_model(&self, conditional: bool) -> Result<DemandModel> {
        Ok(DemandModel::new(self.stats, self.distribution)?.conditional(conditional))
    }

    pub fn params(&self) -> Result<ReplenishmentParams> {
        ReplenishmentParams::compute(
            &self.stats,
            self.safety_factor,
            self.spec.lead_time,
            self.review_period,
        )
    }

    pub fn policy(&self, kind: PolicyKind) -> Policy {
        match kind {
            PolicyKind::Periodic => Policy::PeriodicFixedQ {
                review_period: self.review_period,
                order_quantity: self.order_quantity,
            },
            PolicyKind::PeriodicUpTo => Policy::PeriodicUpTo {
                review_period: self.review_period,
                safety_factor: self.safety_factor,
            },
            PolicyKind::Continuous => Policy::ContinuousFixedQ {
                reorder_point: self.reorder_point,
                order_quantity: self.order_quantity,
            },
            PolicyKind::ContinuousRestore => Policy::ContinuousRestore {
                reorder_point: self.reorder_point,
            },
        }
    }

    /// Configured bounds, falling back to ranges around the reorder point
    /// and monthly demand.
    pub fn search_space(&self, step: u64) -> Result<SearchSpace> {
        let rop = self.params()?.reorder_point;
        let default = SearchSpace::around(rop, self.stats.expected_annual(), step)?;
        SearchSpace::new(
            self.r_bounds.unwrap_or(default.r_range),
            self.q_bounds.unwrap_or(default.q_range),
            step,
        )
    }
}

pub fn load(path: &Path) -> Result<Config> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse(&text, path.parent().unwrap_or(Path::new(".")))
}

pub fn parse(text: &str, base_dir: &Path) -> Result<Config> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    resolve(file, base_dir)
}

pub fn resolve(file: ConfigFile, base_dir: &Path) -> Result<Config> {
    if file.products.is_empty() {
        return Err(Error::Config("no [[product]] entries".into()));
    }
    let needs_history = file.products.iter().any(|p| p.stats.is_none());
    let history = match (&file.history, needs_history) {
        (Some(path), true) => Some(read_history(&base_dir.join(path))?),
        (None, true) => {
            return Err(Error::Config(
                "products without [product.stats] need a `history` file".into(),
            ))
        }
        _ => None,
    };

    let mut products = Vec::with_capacity(file.products.len());
    for entry in file.products {
        let stats = match entry.stats {
            Some(s) => {
                s.validate()?;
                s
            }
            None => {
                let h = history
                    .as_ref()
                    .and_then(|h| h.iter().find(|p| p.id == entry.id))
                    .ok_or_else(|| {
                        Error::Config(format!("product `{}` not found in history", entry.id))
                    })?;
                estimate_stats(&h.demands)?
            }
        };
        products.push(resolve_product(entry, stats)?);
    }
    if file.replications == Some(0) {
        return Err(Error::Config("replications must be >= 1".into()));
    }
    if file.workers == Some(0) {
        return Err(Error::Config("workers must be >= 1".into()));
    }
    Ok(Config {
        seed: file.seed,
        replications: file.replications.unwrap_or(DEFAULT_REPLICATIONS),
        workers: file.workers,
        products,
    })
}

fn resolve_product(entry: ProductEntry, stats: DemandStats) -> Result<Product> {
    let spec = ProductSpec {
        id: entry.id,
        purchase_cost: entry.purchase_cost,
        selling_price: entry.selling_price,
        ordering_cost: entry.ordering_cost,
        holding_rate: entry.holding_rate,
        size: entry.size,
        lead_time: entry.lead_time,
        starting_stock: entry.starting_stock,
    };
    spec.validate()?;
    let distribution = match entry.demand_model {
        DemandModelName::Lognormal => SizeDistribution::Lognormal,
        DemandModelName::Normal => SizeDistribution::Normal,
        DemandModelName::Mixture => SizeDistribution::MixtureTail {
            tail_weight: entry.tail_weight.unwrap_or(DEFAULT_TAIL_WEIGHT),
            tail_shift: entry.tail_shift.unwrap_or(DEFAULT_TAIL_SHIFT),
        },
    };
    let safety_factor = entry.safety_factor.unwrap_or(DEFAULT_SAFETY_FACTOR);
    let order_quantity = entry
        .order_quantity
        .unwrap_or_else(|| ceil_units(stats.expected_annual() / 12.0).max(1));
    let review_period = match entry.review_period {
        Some(p) => p,
        None => matched_review_period(order_quantity, &stats),
    };
    let mut product = Product {
        spec,
        stats,
        distribution,
        safety_factor,
        review_period,
        order_quantity,
        reorder_point: 0,
        r_bounds: entry.r_bounds,
        q_bounds: entry.q_bounds,
    };
    product.reorder_point = match entry.reorder_point {
        Some(r) => r,
        None => product.params()?.reorder_point,
    };
    // Fail early on a bad demand model.
    product.demand_model(false)?;
    Ok(product)
}

/// Review period whose fixed order quantity matches expected demand.
pub fn matched_review_period(order_quantity: u64, stats: &DemandStats) -> u32 {
    let daily = stats.expected_daily();
    if daily <= 0.0 {
        return DAYS_PER_YEAR as u32;
    }
    (order_quantity as f64 / daily).round().clamp(1.0, DAYS_PER_YEAR as f64) as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
seed = 3
[[product]]
id = "A"
purchase_cost = 12.0
selling_price = 16.1
ordering_cost = 1000.0
holding_rate = 0.2
size = 0.57
lead_time = 9
starting_stock = 2750
[product.stats]
mean_daily = 103.5
std_daily = 37.32
demand_probability = 0.76
n_observations = 365
"#;

    #[test]
    fn parses_with_defaults() {
        let c = parse(BASE, Path::new(".")).unwrap();
        assert_eq!(c.seed, Some(3));
        assert_eq!(c.replications, DEFAULT_REPLICATIONS);
        let p = &c.products[0];
        assert_eq!(p.safety_factor, DEFAULT_SAFETY_FACTOR);
        assert_eq!(p.distribution, SizeDistribution::Lognormal);
        // annual 365 * 0.76 * 103.5 = 28710.9 -> monthly 2392.6
        assert_eq!(p.order_quantity, 2393);
        assert_eq!(p.review_period, 30);
        assert_eq!(p.reorder_point, p.params().unwrap().reorder_point);
    }

    #[test]
    fn explicit_policy_settings_win() {
        let text = BASE.replace(
            "starting_stock = 2750",
            "starting_stock = 2750\norder_quantity = 4120\nreorder_point = 4095\nreview_period = 7\ndemand_model = \"mixture\"",
        );
        let c = parse(&text, Path::new(".")).unwrap();
        let p = &c.products[0];
        assert_eq!(p.policy(PolicyKind::Continuous), Policy::ContinuousFixedQ { reorder_point: 4095, order_quantity: 4120 });
        assert_eq!(p.policy(PolicyKind::Periodic), Policy::PeriodicFixedQ { review_period: 7, order_quantity: 4120 });
        assert!(matches!(p.distribution, SizeDistribution::MixtureTail { tail_weight, .. } if tail_weight == 0.1));
    }

    #[test]
    fn rejects_unknown_keys_and_missing_history() {
        assert!(parse(&BASE.replace("seed = 3", "seed = 3\nbogus = 1"), Path::new(".")).is_err());
        let no_stats = BASE.split("[product.stats]").next().unwrap();
        assert!(matches!(parse(no_stats, Path::new(".")), Err(Error::Config(_))));
    }

    #[test]
    fn policy_names() {
        assert_eq!("continuous".parse::<PolicyKind>().unwrap(), PolicyKind::Continuous);
        assert_eq!("periodic".parse::<PolicyKind>().unwrap(), PolicyKind::Periodic);
        assert!("weekly".parse::<PolicyKind>().is_err());
    }

    #[test]
    fn inverted_bounds_fail() {
        let text = BASE.replace("starting_stock = 2750", "starting_stock = 2750\nr_bounds = [10, 5]");
        let c = parse(&text, Path::new(".")).unwrap();
        assert!(c.products[0].search_space(10).is_err());
    }
}
