#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace harq_ee {

enum class SourceKind { Constant, DiscreteMarkov, FluidMarkov, Mmps };

std::string_view to_string(SourceKind kind);

/// Two-state ON-OFF arrival process (or a constant-rate source).
///
/// State 1 is OFF and state 2 is ON. Discrete sources use per-block stay
/// probabilities p11 (OFF) and p22 (ON); fluid and MMPS sources use the
/// continuous-time rates alpha (OFF -> ON) and beta (ON -> OFF), per block.
struct SourceModel {
    SourceKind kind = SourceKind::Constant;
    double p11 = 0.0;
    double p22 = 1.0;
    double alpha = 1.0;
    double beta = 1.0;

    static SourceModel constant();
    static SourceModel discrete_markov(double p11, double p22);
    static SourceModel fluid(double alpha, double beta);
    static SourceModel mmps(double alpha, double beta);

    /// Stationary probability of the ON state.
    double p_on() const;
    void validate() const;
};

/// Asymptotic log-moment generating function Lambda_a(theta) of the arrivals.
/// rate_param is the constant rate a, the ON-state rate r, or the ON-state
/// Poisson intensity nu, depending on the source kind.
double lmgf_arrival(const SourceModel& source, double theta, double rate_param);

struct SolvedArrival {
    double rate_param = 0.0; ///< a, r or nu
    double r_avg = 0.0;      ///< rate_param * P_ON
};

/// Solves Lambda_a(theta) = theta * C_E for the largest supportable arrivals.
/// Throws NumericError if the squared-radical inversion lands on a spurious root.
SolvedArrival solve_arrival(const SourceModel& source, double effective_capacity, double theta);

/// Maximum supportable average arrival rate.
double solve_throughput(const SourceModel& source, double effective_capacity, double theta);

/// Discrete-source burstiness coefficient (1-p22)(p11+p22) / ((1-p11)(2-p11-p22)).
double discrete_zeta(double p11, double p22);

/// Arrival-side penalty in the wideband-slope denominator: theta*zeta for
/// discrete sources, 2 theta beta / (alpha (alpha + beta)) for fluid/MMPS.
double burstiness_penalty(const SourceModel& source, double theta);

/// Poisson-arrival factor theta / (e^theta - 1) for MMPS, 1 otherwise.
double poisson_factor(const SourceModel& source, double theta);

/// |r_avg(theta) - C_E| for each theta; vanishes linearly as theta -> 0.
std::vector<double> theta_zero_limit_check(const SourceModel& source, double effective_capacity,
                                           std::span<const double> thetas);

} // namespace harq_ee
