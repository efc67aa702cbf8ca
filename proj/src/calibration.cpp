#include "ionbench/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "ionbench/error.hpp"

namespace ionbench {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = kPi / 2.0;

// the four pi/2 pulses: +X, -X, +Y, -Y
const std::array<std::pair<double, double>, 4> kHalfTurns{{{kHalfPi, 0.0},
                                                           {kHalfPi, kPi},
                                                           {kHalfPi, kHalfPi},
                                                           {kHalfPi, -kHalfPi}}};

bool definite_outcome(const StateVector& state, int* outcome) {
    for (std::size_t i = 0; i < state.dim(); ++i) {
        if (state.probability(i) > 1.0 - 1e-9) {
            *outcome = static_cast<int>(i);
            return true;
        }
    }
    return false;
}

} // namespace

RBSequence generate_rb_sequence(int length, RandomStream& rng) {
    if (length < 1) {
        throw ValidationError("sequence length must be positive");
    }
    RBSequence seq;
    seq.length = length;
    seq.circuit = Circuit(1);
    StateVector state(1);

    for (int i = 0; i < length; ++i) {
        const auto [theta, phi] = kHalfTurns[rng.uniform_int(4)];
        const Gate pulse = Gate::r(0, theta, phi);
        seq.circuit.append(pulse);
        seq.noisy_slots.push_back(seq.circuit.gates.size() - 1);
        state.apply(pulse);
        // interleaved frame randomization: pi about X, Y, Z, or wait
        switch (rng.uniform_int(4)) {
        case 0: seq.circuit.append(Gate::r(0, kPi, 0.0)); break;
        case 1: seq.circuit.append(Gate::r(0, kPi, kHalfPi)); break;
        case 2: seq.circuit.append(Gate::rz(0, kPi)); break;
        default: break; // idle slot
        }
        if (seq.circuit.gates.size() > seq.noisy_slots.back() + 1) {
            state.apply(seq.circuit.gates.back());
        }
    }

    // closing gate: a pi/2 pulse that lands on a pole where one exists,
    // otherwise keep-or-flip
    std::vector<Gate> candidates;
    for (const auto& [theta, phi] : kHalfTurns) {
        StateVector probe = state;
        probe.apply(Gate::r(0, theta, phi));
        int out = 0;
        if (definite_outcome(probe, &out)) {
            candidates.push_back(Gate::r(0, theta, phi));
        }
    }
    int outcome = 0;
    if (!candidates.empty()) {
        const Gate closing = candidates[rng.uniform_int(candidates.size())];
        seq.circuit.append(closing);
        state.apply(closing);
    } else if (rng.uniform_int(2) == 1) {
        seq.circuit.append(Gate::r(0, kPi, 0.0));
        state.apply(seq.circuit.gates.back());
    }
    if (!definite_outcome(state, &outcome)) {
        throw Error("randomized sequence did not close onto a basis state");
    }
    seq.expected_outcome = outcome;
    return seq;
}

namespace {

struct Amp2 {
    cdouble a0, a1;
};

Amp2 apply_2x2(const Unitary& u, Amp2 s) {
    return {u(0, 0) * s.a0 + u(0, 1) * s.a1, u(1, 0) * s.a0 + u(1, 1) * s.a1};
}

/// Uniform-Pauli rate whose single-qubit depolarization matches an RB decay
/// base f: a random Pauli contracts the Bloch vector by -1/3, so the
/// per-segment contraction is 1 - 4r/3.
double rb_pauli_rate(double fidelity) {
    if (!(fidelity > 0.0) || fidelity > 1.0) {
        throw ValidationError("fidelity must lie in (0,1]");
    }
    return std::min(1.0, 0.75 * (1.0 - fidelity));
}

} // namespace

double bell_pauli_rate(double fidelity) {
    if (!(fidelity > 0.0) || fidelity > 1.0) {
        throw ValidationError("fidelity must lie in (0,1]");
    }
    // 3 of the 15 two-qubit Paulis stabilize the Bell state, so the overlap
    // after the channel is 1 - (4/5) r
    return std::min(1.0, 1.25 * (1.0 - fidelity));
}

RBCampaignResult run_rb_campaign(int qubit, const DeviceModel& device, std::span<const int> lengths,
                                 int seqs_per_length, std::uint64_t shots, std::uint64_t seed) {
    if (qubit < 0 || qubit >= kDeviceQubits) {
        throw ValidationError("qubit index outside device");
    }
    if (lengths.empty() || seqs_per_length < 1 || shots < 1) {
        throw ValidationError("campaign needs lengths, sequences, and shots");
    }
    const double rate = rb_pauli_rate(device.f_1q[static_cast<std::size_t>(qubit)]);
    const double spam_flip = 1.0 - device.f_spam[static_cast<std::size_t>(qubit)];

    RBCampaignResult result;
    std::vector<std::pair<double, double>> points;
    for (std::size_t li = 0; li < lengths.size(); ++li) {
        const int length = lengths[li];
        for (int sid = 0; sid < seqs_per_length; ++sid) {
            RandomStream rng(derive_seed(seed, static_cast<std::uint64_t>(length), static_cast<std::uint64_t>(sid)));
            const RBSequence seq = generate_rb_sequence(length, rng);

            std::vector<Unitary> mats;
            mats.reserve(seq.circuit.gates.size());
            std::vector<Amp2> prefix;
            prefix.reserve(seq.circuit.gates.size() + 1);
            prefix.push_back({1.0, 0.0});
            for (const auto& g : seq.circuit.gates) {
                mats.push_back(gate_unitary(g));
                prefix.push_back(apply_2x2(mats.back(), prefix.back()));
            }
            const double clean_p0 = std::norm(prefix.back().a0);

            std::uint64_t survived = 0;
            std::vector<std::pair<std::size_t, int>> errors;
            for (std::uint64_t shot = 0; shot < shots; ++shot) {
                errors.clear();
                for (std::size_t slot : seq.noisy_slots) {
                    if (rng.bernoulli(rate)) {
                        errors.emplace_back(slot, static_cast<int>(rng.uniform_int(3)));
                    }
                }
                double p0;
                if (errors.empty()) {
                    p0 = clean_p0;
                } else {
                    Amp2 st = prefix[errors.front().first + 1];
                    std::size_t next_err = 0;
                    for (std::size_t gi = errors.front().first; gi < mats.size(); ++gi) {
                        if (gi != errors.front().first) {
                            st = apply_2x2(mats[gi], st);
                        }
                        if (next_err < errors.size() && errors[next_err].first == gi) {
                            switch (errors[next_err].second) {
                            case 0: st = {st.a1, st.a0}; break;                                    // X
                            case 1: st = {cdouble(0, -1) * st.a1, cdouble(0, 1) * st.a0}; break;   // Y
                            default: st = {st.a0, -st.a1}; break;                                  // Z
                            }
                            ++next_err;
                        }
                    }
                    p0 = std::norm(st.a0) / (std::norm(st.a0) + std::norm(st.a1));
                }
                int outcome = rng.uniform() < p0 ? 0 : 1;
                if (rng.bernoulli(spam_flip)) {
                    outcome ^= 1;
                }
                survived += (outcome == seq.expected_outcome) ? 1 : 0;
            }
            const double survival = static_cast<double>(survived) / static_cast<double>(shots);
            result.points.push_back({qubit, length, sid, survival});
            points.emplace_back(static_cast<double>(length), survival);
        }
    }
    result.fit = fit_power_law(points);
    return result;
}

PowerLawFit fit_power_law(std::span<const std::pair<double, double>> points) {
    std::vector<double> distinct;
    for (const auto& [L, s] : points) {
        if (s < 0.0 || s > 1.0) {
            throw ValidationError("survival probabilities must lie in [0,1]");
        }
        if (std::find(distinct.begin(), distinct.end(), L) == distinct.end()) {
            distinct.push_back(L);
        }
    }
    if (distinct.size() < 3) {
        throw FitError("power-law fit needs at least 3 distinct lengths");
    }

    // starting point from a log-linear regression of s - 1/2
    double p = 0.99;
    double B = 0.49;
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (const auto& [L, s] : points) {
            if (s - 0.5 > 1e-9) {
                const double y = std::log(s - 0.5);
                sx += L; sy += y; sxx += L * L; sxy += L * y;
                ++n;
            }
        }
        if (n >= 2) {
            const double denom = n * sxx - sx * sx;
            if (std::abs(denom) > 1e-12) {
                const double slope = (n * sxy - sx * sy) / denom;
                const double intercept = (sy - slope * sx) / n;
                p = std::clamp(std::exp(slope), 0.5, 1.0);
                B = std::clamp(std::exp(intercept), 1e-3, 0.5);
            }
        }
    }

    const auto ssr_of = [&](double b, double q) {
        double ssr = 0;
        for (const auto& [L, s] : points) {
            const double r = b * std::pow(q, L) + 0.5 - s;
            ssr += r * r;
        }
        return ssr;
    };

    double ssr = ssr_of(B, p);
    double lambda = 1e-3;
    bool converged = ssr < 1e-30;
    for (int iter = 0; iter < 200 && !converged; ++iter) {
        // normal equations for residual r_i = B p^L + 1/2 - s_i
        double jtj00 = 0, jtj01 = 0, jtj11 = 0, jtr0 = 0, jtr1 = 0;
        for (const auto& [L, s] : points) {
            const double pL = std::pow(p, L);
            const double r = B * pL + 0.5 - s;
            const double jB = pL;
            const double jp = B * L * std::pow(p, L - 1.0);
            jtj00 += jB * jB;
            jtj01 += jB * jp;
            jtj11 += jp * jp;
            jtr0 += jB * r;
            jtr1 += jp * r;
        }
        bool stepped = false;
        for (int attempt = 0; attempt < 30; ++attempt) {
            const double a00 = jtj00 * (1.0 + lambda);
            const double a11 = jtj11 * (1.0 + lambda);
            const double det = a00 * a11 - jtj01 * jtj01;
            if (std::abs(det) < 1e-300) {
                break;
            }
            const double dB = (-jtr0 * a11 + jtr1 * jtj01) / det;
            const double dp = (-jtr1 * a00 + jtr0 * jtj01) / det;
            const double Bn = std::clamp(B + dB, 1e-9, 0.5);
            const double pn = std::clamp(p + dp, 1e-9, 1.0);
            const double ssr_new = ssr_of(Bn, pn);
            if (ssr_new <= ssr) {
                const double improvement = ssr - ssr_new;
                B = Bn;
                p = pn;
                ssr = ssr_new;
                lambda = std::max(lambda / 3.0, 1e-12);
                stepped = true;
                if (improvement < 1e-15 * (1.0 + ssr) || (std::abs(dB) < 1e-12 && std::abs(dp) < 1e-12)) {
                    converged = true;
                }
                break;
            }
            lambda *= 3.0;
        }
        if (!stepped) {
            converged = true; // no descent direction left
        }
    }
    if (!converged) {
        throw FitError("power-law fit did not converge (ssr=" + std::to_string(ssr) + ")");
    }

    // parameter standard errors from the fit covariance
    double jtj00 = 0, jtj01 = 0, jtj11 = 0;
    for (const auto& [L, s] : points) {
        const double pL = std::pow(p, L);
        const double jB = pL;
        const double jp = B * L * std::pow(p, L - 1.0);
        jtj00 += jB * jB;
        jtj01 += jB * jp;
        jtj11 += jp * jp;
    }
    PowerLawFit fit;
    fit.p = p;
    fit.B = B;
    fit.residual = ssr;
    const double dof = std::max<std::size_t>(1, points.size() - 2);
    const double sigma2 = ssr / static_cast<double>(dof);
    const double det = jtj00 * jtj11 - jtj01 * jtj01;
    if (det > 1e-300) {
        fit.B_err = std::sqrt(std::max(0.0, sigma2 * jtj11 / det));
        fit.p_err = std::sqrt(std::max(0.0, sigma2 * jtj00 / det));
    }
    return fit;
}

std::vector<double> default_parity_phases(int count) {
    std::vector<double> phases(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        phases[static_cast<std::size_t>(k)] = 2.0 * kPi * k / count;
    }
    return phases;
}

namespace {

StateVector bell_state(int chi_sign) {
    StateVector st(2);
    st.apply(Gate::xx(0, 1, chi_sign * kPi / 4.0));
    return st;
}

/// Outcome distributions for the 16 trajectory branches (no error + 15
/// Paulis after the entangler), measured after an optional analysis pulse.
std::array<std::array<double, 4>, 16> branch_distributions(int chi_sign, double phase,
                                                           bool analysis_pulse) {
    std::array<std::array<double, 4>, 16> table{};
    const StateVector base = bell_state(chi_sign);
    for (int branch = 0; branch < 16; ++branch) {
        StateVector st = base;
        if (branch > 0) {
            const int p0 = branch / 4;
            const int p1 = branch % 4;
            if (p0 != 0) st.apply_pauli(0, p0 - 1);
            if (p1 != 0) st.apply_pauli(1, p1 - 1);
        }
        if (analysis_pulse) {
            st.apply(Gate::r(0, kHalfPi, phase));
            st.apply(Gate::r(1, kHalfPi, phase));
        }
        for (int out = 0; out < 4; ++out) {
            table[static_cast<std::size_t>(branch)][static_cast<std::size_t>(out)] =
                st.probability(static_cast<std::size_t>(out));
        }
    }
    return table;
}

std::array<double, 4> sample_joint(const std::array<std::array<double, 4>, 16>& table,
                                   double pauli_rate, std::uint64_t shots, double detection_misid,
                                   RandomStream& rng) {
    std::array<std::uint64_t, 4> counts{};
    for (std::uint64_t shot = 0; shot < shots; ++shot) {
        int branch = 0;
        if (rng.bernoulli(pauli_rate)) {
            branch = 1 + static_cast<int>(rng.uniform_int(15));
        }
        const auto& dist = table[static_cast<std::size_t>(branch)];
        const double u = rng.uniform();
        int out = 0;
        double acc = 0.0;
        for (; out < 3; ++out) {
            acc += dist[static_cast<std::size_t>(out)];
            if (u < acc) {
                break;
            }
        }
        if (detection_misid > 0.0) {
            if (rng.bernoulli(detection_misid)) out ^= 2;
            if (rng.bernoulli(detection_misid)) out ^= 1;
        }
        ++counts[static_cast<std::size_t>(out)];
    }
    std::array<double, 4> fractions{};
    for (int i = 0; i < 4; ++i) {
        fractions[static_cast<std::size_t>(i)] =
            static_cast<double>(counts[static_cast<std::size_t>(i)]) / static_cast<double>(shots);
    }
    return fractions;
}

} // namespace

ParityScan parity_scan_with_rate(int chi_sign, double xx_pauli_rate, std::span<const double> phases,
                                 std::uint64_t shots, std::uint64_t seed, double detection_misid) {
    if (phases.size() < 8) {
        throw ValidationError("parity scan needs at least 8 phase points");
    }
    if (shots < 1) {
        throw ValidationError("parity scan needs at least one shot per phase");
    }
    if (xx_pauli_rate < 0.0 || xx_pauli_rate > 1.0) {
        throw ValidationError("pauli rate must lie in [0,1]");
    }
    ParityScan scan;
    scan.shots_per_phase = shots;
    scan.phases.assign(phases.begin(), phases.end());
    scan.populations.reserve(phases.size());
    for (std::size_t k = 0; k < phases.size(); ++k) {
        const auto table = branch_distributions(chi_sign, phases[k], true);
        RandomStream rng(derive_seed(seed, k));
        scan.populations.push_back(sample_joint(table, xx_pauli_rate, shots, detection_misid, rng));
    }
    return scan;
}

ParityScan parity_scan(std::pair<int, int> pair, int chi_sign, const NoiseConfig& noise,
                       std::span<const double> phases, std::uint64_t shots, std::uint64_t seed) {
    double rate = 0.0;
    if (noise.pauli_from_device) {
        if (!noise.device) {
            throw ConfigError("pauli_from_device set but no device model given");
        }
        rate = bell_pauli_rate(noise.device->f_2q_for(pair.first, pair.second));
    }
    return parity_scan_with_rate(chi_sign, rate, phases, shots, seed, noise.detection_misid);
}

std::array<double, 4> bell_population_measurement_with_rate(int chi_sign, double xx_pauli_rate,
                                                            std::uint64_t shots, std::uint64_t seed,
                                                            double detection_misid) {
    if (shots < 1) {
        throw ValidationError("population measurement needs at least one shot");
    }
    const auto table = branch_distributions(chi_sign, 0.0, false);
    RandomStream rng(derive_seed(seed, 0x706f70ULL));
    return sample_joint(table, xx_pauli_rate, shots, detection_misid, rng);
}

std::array<double, 4> bell_population_measurement(std::pair<int, int> pair, int chi_sign,
                                                  const NoiseConfig& noise, std::uint64_t shots,
                                                  std::uint64_t seed) {
    double rate = 0.0;
    if (noise.pauli_from_device) {
        if (!noise.device) {
            throw ConfigError("pauli_from_device set but no device model given");
        }
        rate = bell_pauli_rate(noise.device->f_2q_for(pair.first, pair.second));
    }
    return bell_population_measurement_with_rate(chi_sign, rate, shots, seed, noise.detection_misid);
}

namespace {

double safe_log(double p) {
    return std::log(std::max(p, 1e-300));
}

/// Golden-section maximization of a smooth 1D function on [lo, hi].
template <typename F>
double golden_max(const F& f, double lo, double hi, int iters, double* best_x) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int i = 0; i < iters; ++i) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    const double xm = 0.5 * (a + b);
    const double fm = f(xm);
    double fx = fm;
    double x = xm;
    for (const auto& [cx, cf] : {std::pair{lo, f(lo)}, std::pair{hi, f(hi)}}) {
        if (cf > fx) {
            fx = cf;
            x = cx;
        }
    }
    if (best_x) {
        *best_x = x;
    }
    return fx;
}

/// The likelihood separates: the scan depends only on (Phi, delta) through
/// the even-parity probability, the population measurement only on
/// (P00, P11). The profile over F couples them through P00 + P11 + Phi = 2F.
struct TomoData {
    std::vector<double> phases;
    std::vector<double> even_counts; // n00 + n11 per phase
    std::vector<double> odd_counts;  // n01 + n10 per phase
    double n00 = 0.0, n11 = 0.0, n_odd = 0.0;
};

double scan_loglik(const TomoData& d, double phi, double delta) {
    if (phi < 0.0 || phi > 1.0) {
        return -1e100;
    }
    double ll = 0.0;
    for (std::size_t k = 0; k < d.phases.size(); ++k) {
        const double even = std::clamp(0.5 * (1.0 + phi * std::cos(2.0 * d.phases[k] + delta)), 0.0, 1.0);
        if (d.even_counts[k] > 0.0) {
            ll += d.even_counts[k] * safe_log(even / 2.0);
        }
        if (d.odd_counts[k] > 0.0) {
            ll += d.odd_counts[k] * safe_log((1.0 - even) / 2.0);
        }
    }
    return ll;
}

double pop_loglik(const TomoData& d, double p00, double p11) {
    if (p00 < 0.0 || p11 < 0.0 || p00 + p11 > 1.0) {
        return -1e100;
    }
    double ll = 0.0;
    if (d.n00 > 0.0) {
        ll += d.n00 * safe_log(p00);
    }
    if (d.n11 > 0.0) {
        ll += d.n11 * safe_log(p11);
    }
    if (d.n_odd > 0.0) {
        ll += d.n_odd * safe_log((1.0 - p00 - p11) / 2.0);
    }
    return ll;
}

/// max over delta for fixed phi: coarse grid, then golden refinement.
double best_delta_loglik(const TomoData& d, double phi, double* delta_out) {
    const int grid = 72;
    double best = -1e300;
    double at = 0.0;
    for (int i = 0; i < grid; ++i) {
        const double delta = -kPi + 2.0 * kPi * i / grid;
        const double v = scan_loglik(d, phi, delta);
        if (v > best) {
            best = v;
            at = delta;
        }
    }
    const double step = 2.0 * kPi / grid;
    double refined = at;
    const double v = golden_max([&](double delta) { return scan_loglik(d, phi, delta); }, at - step,
                                at + step, 50, &refined);
    if (delta_out) {
        *delta_out = refined;
    }
    return std::max(v, best);
}

/// max over (p00, p11) with p00 + p11 = s fixed; the split is closed-form.
double pop_profile_loglik(const TomoData& d, double s) {
    if (s < 0.0 || s > 1.0) {
        return -1e100;
    }
    const double even_total = d.n00 + d.n11;
    double p00 = s / 2.0;
    double p11 = s / 2.0;
    if (even_total > 0.0) {
        p00 = s * d.n00 / even_total;
        p11 = s * d.n11 / even_total;
    }
    return pop_loglik(d, p00, p11);
}

TomoData build_data(const ParityScan& scan, const std::array<double, 4>& population_fractions,
                    std::uint64_t population_shots) {
    if (scan.phases.size() != scan.populations.size()) {
        throw ValidationError("scan phases and populations disagree");
    }
    TomoData d;
    d.phases = scan.phases;
    for (const auto& pops : scan.populations) {
        const double total = pops[0] + pops[1] + pops[2] + pops[3];
        if (std::abs(total - 1.0) > 1e-9) {
            throw ValidationError("scan populations must sum to 1");
        }
        const double n = static_cast<double>(scan.shots_per_phase);
        d.even_counts.push_back((pops[0] + pops[3]) * n);
        d.odd_counts.push_back((pops[1] + pops[2]) * n);
    }
    const double n = static_cast<double>(population_shots);
    d.n00 = population_fractions[0] * n;
    d.n11 = population_fractions[3] * n;
    d.n_odd = (population_fractions[1] + population_fractions[2]) * n;
    return d;
}

} // namespace

double tomography_log_likelihood(const ParityScan& scan,
                                 const std::array<double, 4>& population_fractions,
                                 std::uint64_t population_shots, double p00, double p11, double phi,
                                 double delta) {
    const TomoData d = build_data(scan, population_fractions, population_shots);
    return scan_loglik(d, phi, delta) + pop_loglik(d, p00, p11);
}

std::array<double, 4> naive_tomography_estimate(const ParityScan& scan,
                                                const std::array<double, 4>& population_fractions) {
    double ac = 0.0;
    double as = 0.0;
    for (std::size_t k = 0; k < scan.phases.size(); ++k) {
        const auto& p = scan.populations[k];
        const double parity = p[0] + p[3] - p[1] - p[2];
        ac += parity * std::cos(2.0 * scan.phases[k]);
        as += parity * std::sin(2.0 * scan.phases[k]);
    }
    const double n = static_cast<double>(scan.phases.size());
    const double a = 2.0 * ac / n;
    const double b = 2.0 * as / n;
    const double phi = std::min(1.0, std::hypot(a, b));
    const double delta = std::atan2(-b, a);
    return {std::clamp(population_fractions[0], 0.0, 1.0),
            std::clamp(population_fractions[3], 0.0, 1.0), phi, delta};
}

TomographyEstimate mle_fidelity(const ParityScan& scan,
                                const std::array<double, 4>& population_fractions,
                                std::uint64_t population_shots, double ci_sigma) {
    std::vector<double> distinct;
    for (double ph : scan.phases) {
        if (std::find(distinct.begin(), distinct.end(), ph) == distinct.end()) {
            distinct.push_back(ph);
        }
    }
    if (distinct.size() < 2) {
        throw FitError("parity scan is underdetermined: need at least 2 distinct phases");
    }
    if (population_shots == 0) {
        throw ValidationError("population measurement needs at least one shot");
    }
    const TomoData data = build_data(scan, population_fractions, population_shots);

    // global optimum: the population part has the plain multinomial solution,
    // the scan part is a 1D search in phi with delta profiled out
    TomographyEstimate est;
    const double pop_total = data.n00 + data.n11 + data.n_odd;
    est.p00 = data.n00 / pop_total;
    est.p11 = data.n11 / pop_total;

    const int grid = 101;
    double phi_best = 0.0;
    double ll1_best = -1e300;
    for (int i = 0; i < grid; ++i) {
        const double phi = static_cast<double>(i) / (grid - 1);
        const double v = best_delta_loglik(data, phi, nullptr);
        if (v > ll1_best) {
            ll1_best = v;
            phi_best = phi;
        }
    }
    const double span = 1.0 / (grid - 1);
    golden_max([&](double phi) { return best_delta_loglik(data, phi, nullptr); },
               std::max(0.0, phi_best - span), std::min(1.0, phi_best + span), 60, &phi_best);
    est.phi = phi_best;
    const double ll_scan = best_delta_loglik(data, phi_best, &est.delta);
    const double ll_max = ll_scan + pop_loglik(data, est.p00, est.p11);
    est.fidelity = (est.p00 + est.p11 + est.phi) / 2.0;

    // profile likelihood of F = (P00 + P11 + Phi)/2: for fixed F, maximize
    // over the phi split; the population split at fixed sum is closed-form
    const auto profile = [&](double fidelity) {
        const double lo = std::max(0.0, 2.0 * fidelity - 1.0);
        const double hi = std::min(1.0, 2.0 * fidelity);
        if (lo > hi) {
            return -1e300;
        }
        const auto h = [&](double phi) {
            return best_delta_loglik(data, phi, nullptr) + pop_profile_loglik(data, 2.0 * fidelity - phi);
        };
        const int coarse = 17;
        double best_phi = lo;
        double best_v = -1e300;
        for (int i = 0; i < coarse; ++i) {
            const double phi = lo + (hi - lo) * i / (coarse - 1);
            const double v = h(phi);
            if (v > best_v) {
                best_v = v;
                best_phi = phi;
            }
        }
        const double window = (hi - lo) / (coarse - 1);
        const double refined = golden_max(h, std::max(lo, best_phi - window),
                                          std::min(hi, best_phi + window), 40, nullptr);
        return std::max(best_v, refined);
    };

    const double target = ll_max - ci_sigma * ci_sigma / 2.0;
    const auto find_bound = [&](double direction) {
        double inside = est.fidelity;
        double step = 0.005;
        double outside = inside;
        for (int i = 0; i < 60; ++i) {
            outside = std::clamp(inside + direction * step, 0.0, 1.0);
            if (profile(outside) < target) {
                break;
            }
            inside = outside;
            if (outside >= 1.0 || outside <= 0.0) {
                return outside; // likelihood never drops before the boundary
            }
            step *= 1.8;
        }
        if (profile(outside) >= target) {
            return outside;
        }
        double lo = inside;
        double hi = outside;
        for (int i = 0; i < 45; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (profile(mid) >= target) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return lo;
    };

    est.ci_high = find_bound(+1.0);
    est.ci_low = find_bound(-1.0);
    est.ci_low = std::min(est.ci_low, est.fidelity);
    est.ci_high = std::max(est.ci_high, est.fidelity);
    return est;
}

} // namespace ionbench
