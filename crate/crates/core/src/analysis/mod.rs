//! Monitors and post-processing that check the quantitative claims:
//! energy inequality, uniform bounds, trilinear inequalities, difference
//! norms and convergence rates.

mod apriori;
mod budget;
mod diff;
mod energy;
mod ladyzhenskaya;
mod maxprinciple;
mod rate;

pub use apriori::{apriori_check, AprioriMonitor, AprioriRun, AprioriVerdict, APRIORI_GROWTH_LIMIT, APRIORI_KEYS};
pub use budget::TracerBudget;
pub use diff::{diff_norms, diff_sample, DiffMonitor, DiffRecord, DiffSample, DIFF_KEYS};
pub use energy::{energy_check, halving_ratios, EnergyBudget, EnergyMonitor, EnergyReport};
pub use ladyzhenskaya::{
    ladyzhenskaya_sample, ladyzhenskaya_terms, LadyzhenskayaStats, LadyzhenskayaTerms, RatioStats,
};
pub use maxprinciple::{
    max_principle_check, physical_concentration, MaxPrincipleMonitor, MaxPrincipleReport, MAX_PRINCIPLE_TOL,
};
pub use rate::{decreasing_with, fit_power_law, fit_rate, RateFit, MIN_R_SQUARED, MIN_SLOPE};

#[cfg(test)]
mod tests;
