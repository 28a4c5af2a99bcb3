#include "halotrace/integrate.hpp"

#include <algorithm>
#include <cmath>

namespace halotrace {

namespace {

// Prince-Dormand RK8(7), 13 stages. Nodes, stage coefficients and the paired
// 8th/7th order solution weights.
constexpr int kStages = 13;

constexpr double kC[kStages] = {
    0.0,
    1.0 / 18.0,
    1.0 / 12.0,
    1.0 / 8.0,
    5.0 / 16.0,
    3.0 / 8.0,
    59.0 / 400.0,
    93.0 / 200.0,
    5490023248.0 / 9719169821.0,
    13.0 / 20.0,
    1201146811.0 / 1299019798.0,
    1.0,
    1.0,
};

constexpr double kA[kStages][kStages - 1] = {
    {},
    {1.0 / 18.0},
    {1.0 / 48.0, 1.0 / 16.0},
    {1.0 / 32.0, 0.0, 3.0 / 32.0},
    {5.0 / 16.0, 0.0, -75.0 / 64.0, 75.0 / 64.0},
    {3.0 / 80.0, 0.0, 0.0, 3.0 / 16.0, 3.0 / 20.0},
    {29443841.0 / 614563906.0, 0.0, 0.0, 77736538.0 / 692538347.0,
     -28693883.0 / 1125000000.0, 23124283.0 / 1800000000.0},
    {16016141.0 / 946692911.0, 0.0, 0.0, 61564180.0 / 158732637.0,
     22789713.0 / 633445777.0, 545815736.0 / 2771057229.0, -180193667.0 / 1043307555.0},
    {39632708.0 / 573591083.0, 0.0, 0.0, -433636366.0 / 683701615.0,
     -421739975.0 / 2616292301.0, 100302831.0 / 723423059.0, 790204164.0 / 839813087.0,
     800635310.0 / 3783071287.0},
    {246121993.0 / 1340847787.0, 0.0, 0.0, -37695042795.0 / 15268766246.0,
     -309121744.0 / 1061227803.0, -12992083.0 / 490766935.0, 6005943493.0 / 2108947869.0,
     393006217.0 / 1396673457.0, 123872331.0 / 1001029789.0},
    {-1028468189.0 / 846180014.0, 0.0, 0.0, 8478235783.0 / 508512852.0,
     1311729495.0 / 1432422823.0, -10304129995.0 / 1701304382.0, -48777925059.0 / 3047939560.0,
     15336726248.0 / 1032824649.0, -45442868181.0 / 3398467696.0, 3065993473.0 / 597172653.0},
    {185892177.0 / 718116043.0, 0.0, 0.0, -3185094517.0 / 667107341.0,
     -477755414.0 / 1098053517.0, -703635378.0 / 230739211.0, 5731566787.0 / 1027545527.0,
     5232866602.0 / 850066563.0, -4093664535.0 / 808688257.0, 3962137247.0 / 1805957418.0,
     65686358.0 / 487910083.0},
    {403863854.0 / 491063109.0, 0.0, 0.0, -5068492393.0 / 434740067.0,
     -411421997.0 / 543043805.0, 652783627.0 / 914296604.0, 11173962825.0 / 925320556.0,
     -13158990841.0 / 6184727034.0, 3936647629.0 / 1978049680.0, -160528059.0 / 685178525.0,
     248638103.0 / 1413531060.0, 0.0},
};

constexpr double kB8[kStages] = {
    14005451.0 / 335480064.0, 0.0, 0.0, 0.0, 0.0,
    -59238493.0 / 1068277825.0, 181606767.0 / 758867731.0, 561292985.0 / 797845732.0,
    -1041891430.0 / 1371343529.0, 760417239.0 / 1151165299.0, 118820643.0 / 751138087.0,
    -528747749.0 / 2220607170.0, 1.0 / 4.0,
};

constexpr double kB7[kStages] = {
    13451932.0 / 455176623.0, 0.0, 0.0, 0.0, 0.0,
    -808719846.0 / 976000145.0, 1757004468.0 / 5645159321.0, 656045339.0 / 265891186.0,
    -3867574721.0 / 1518517206.0, 465885868.0 / 322736535.0, 53011238.0 / 667516719.0,
    2.0 / 45.0, 0.0,
};

template <std::size_t N>
using Vec = std::array<double, N>;

// One trial step from (t, y) with step h. Returns the scaled error max-norm
// (accept when <= 1) and writes the 8th-order solution into y8.
template <std::size_t N, class Rhs>
double try_step(const Rhs& rhs, double t, const Vec<N>& y, double h,
                const IntegratorOptions& opts, Vec<N>& y8) {
    std::array<Vec<N>, kStages> f;
    f[0] = rhs(t, y);
    Vec<N> stage;
    for (int s = 1; s < kStages; ++s) {
        for (std::size_t i = 0; i < N; ++i) {
            double acc = 0.0;
            for (int j = 0; j < s; ++j) acc += kA[s][j] * f[j][i];
            stage[i] = y[i] + h * acc;
        }
        f[s] = rhs(t + kC[s] * h, stage);
    }
    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        double acc8 = 0.0, acc7 = 0.0;
        for (int s = 0; s < kStages; ++s) {
            acc8 += kB8[s] * f[s][i];
            acc7 += kB7[s] * f[s][i];
        }
        y8[i] = y[i] + h * acc8;
        const double y7 = y[i] + h * acc7;
        const double scale = opts.abs_tol + opts.rel_tol * std::max(std::abs(y[i]), std::abs(y8[i]));
        err = std::max(err, std::abs(y8[i] - y7) / scale);
    }
    return err;
}

// Drives the adaptive loop over [t0, t1]; calls observer(t, y) after t0 and
// after every accepted step. The observer returns false to stop early.
template <std::size_t N, class Rhs, class Observer>
void integrate_adaptive(const Rhs& rhs, Vec<N>& y, double t0, double t1,
                        const IntegratorOptions& opts, Observer&& observer) {
    if (!observer(t0, static_cast<const Vec<N>&>(y))) return;
    if (t1 == t0) return;

    const double dir = t1 > t0 ? 1.0 : -1.0;
    double t = t0;
    double h = dir * std::min(std::abs(opts.initial_step), std::abs(t1 - t0));
    Vec<N> y_next;

    for (std::size_t n = 0; n < opts.max_steps; ++n) {
        if ((t + h - t1) * dir > 0.0) h = t1 - t;
        const double err = try_step<N>(rhs, t, y, h, opts, y_next);
        if (err <= 1.0) {
            t = (t + h - t1) * dir >= 0.0 ? t1 : t + h;
            y = y_next;
            if (!observer(t, static_cast<const Vec<N>&>(y)) || t == t1) return;
        }
        double factor = err > 0.0 ? 0.9 * std::pow(err, -1.0 / 8.0) : 4.0;
        factor = std::clamp(factor, 0.2, 4.0);
        h *= factor;
        if (std::abs(h) < opts.min_step) {
            throw ConvergenceError("integrator step size underflow at t = " + std::to_string(t));
        }
    }
    throw ConvergenceError("integrator exceeded max_steps");
}

struct Cr3bpRhs {
    double mu;
    Vec<6> operator()(double, const Vec<6>& y) const {
        State6 s{y[0], y[1], y[2], y[3], y[4], y[5]};
        const State6 d = eom(s, mu);
        return {d.x, d.y, d.z, d.vx, d.vy, d.vz};
    }
};

// State + state transition matrix: phi' = A(x) phi with
// A = [0 I; H C], H the potential Hessian and C the Coriolis block.
struct Cr3bpStmRhs {
    double mu;
    Vec<42> operator()(double, const Vec<42>& y) const {
        Vec<42> d{};
        State6 s{y[0], y[1], y[2], y[3], y[4], y[5]};
        const State6 ds = eom(s, mu);
        for (int i = 0; i < 6; ++i) d[i] = ds[i];

        const auto hess = potential_hessian(s.position(), mu);
        double a[6][6] = {};
        a[0][3] = a[1][4] = a[2][5] = 1.0;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) a[3 + r][c] = hess[3 * r + c];
        a[3][4] = 2.0;
        a[4][3] = -2.0;

        for (int r = 0; r < 6; ++r) {
            for (int c = 0; c < 6; ++c) {
                double acc = 0.0;
                for (int k = 0; k < 6; ++k) acc += a[r][k] * y[6 + 6 * k + c];
                d[6 + 6 * r + c] = acc;
            }
        }
        return d;
    }
};

Vec<6> to_vec(const State6& s) { return {s.x, s.y, s.z, s.vx, s.vy, s.vz}; }

State6 to_state(const Vec<6>& v) { return {v[0], v[1], v[2], v[3], v[4], v[5]}; }

}  // namespace

Trajectory integrate(const State6& state0, double mu, double t0, double t1,
                     const IntegratorOptions& opts) {
    Trajectory traj;
    Vec<6> y = to_vec(state0);
    integrate_adaptive<6>(Cr3bpRhs{mu}, y, t0, t1, opts, [&](double t, const Vec<6>& s) {
        traj.times.push_back(t);
        traj.states.push_back(to_state(s));
        return true;
    });
    return traj;
}

Trajectory integrate_sampled(const State6& state0, double mu, double t0, double t1,
                             int n_samples, const IntegratorOptions& opts) {
    if (n_samples < 2) throw std::invalid_argument("integrate_sampled: need n_samples >= 2");
    Trajectory traj;
    traj.times.reserve(n_samples);
    traj.states.reserve(n_samples);
    Vec<6> y = to_vec(state0);
    traj.times.push_back(t0);
    traj.states.push_back(state0);
    double t_prev = t0;
    for (int k = 1; k < n_samples; ++k) {
        const double t_k = t0 + (t1 - t0) * static_cast<double>(k) / (n_samples - 1);
        integrate_adaptive<6>(Cr3bpRhs{mu}, y, t_prev, t_k, opts, [](double, const Vec<6>&) { return true; });
        traj.times.push_back(t_k);
        traj.states.push_back(to_state(y));
        t_prev = t_k;
    }
    return traj;
}

State6 integrate_to(const State6& state0, double mu, double t0, double t1,
                    const IntegratorOptions& opts) {
    Vec<6> y = to_vec(state0);
    integrate_adaptive<6>(Cr3bpRhs{mu}, y, t0, t1, opts, [](double, const Vec<6>&) { return true; });
    return to_state(y);
}

StmResult integrate_with_stm(const State6& state0, double mu, double t0, double t1,
                             const IntegratorOptions& opts) {
    Vec<42> y{};
    for (int i = 0; i < 6; ++i) y[i] = state0[i];
    for (int i = 0; i < 6; ++i) y[6 + 7 * i] = 1.0;
    integrate_adaptive<42>(Cr3bpStmRhs{mu}, y, t0, t1, opts, [](double, const Vec<42>&) { return true; });
    StmResult out;
    out.state = State6{y[0], y[1], y[2], y[3], y[4], y[5]};
    for (int i = 0; i < 36; ++i) out.stm[i] = y[6 + i];
    return out;
}

PlaneCrossing find_y_plane_crossing(const State6& state0, double mu, double t0,
                                    double t_max, const IntegratorOptions& opts) {
    // Step until y changes sign relative to the departure sign, then refine
    // by safeguarded Newton on y(t) using short re-integrations.
    double t_a = t0;
    State6 s_a = state0;
    double t_b = t0;
    State6 s_b = state0;
    int depart_sign = 0;
    bool bracketed = false;

    Vec<6> y = to_vec(state0);
    double t_prev = t0;
    State6 s_prev = state0;
    integrate_adaptive<6>(Cr3bpRhs{mu}, y, t0, t_max, opts, [&](double t, const Vec<6>& v) {
        const State6 s = to_state(v);
        if (t > t0) {
            const int sgn = s.y > 0.0 ? 1 : (s.y < 0.0 ? -1 : 0);
            if (depart_sign == 0) {
                depart_sign = sgn;
            } else if (sgn != 0 && sgn != depart_sign) {
                t_a = t_prev;
                s_a = s_prev;
                t_b = t;
                s_b = s;
                bracketed = true;
                return false;
            }
        }
        t_prev = t;
        s_prev = s;
        return true;
    });
    if (!bracketed) {
        throw ConvergenceError("no y = 0 crossing found before t_max");
    }

    // Newton from the bracket midpoint, falling back to bisection whenever an
    // iterate leaves [t_a, t_b]. State at candidate times comes from fresh
    // short integrations started at the left bracket state.
    const int sign_a = s_a.y > 0.0 ? 1 : -1;
    double t_c = 0.5 * (t_a + t_b);
    State6 s_c = s_b;
    for (int iter = 0; iter < 60; ++iter) {
        s_c = integrate_to(s_a, mu, t_a, t_c, opts);
        if (std::abs(s_c.y) < 1e-14 || t_b - t_a < 1e-15 * std::max(1.0, std::abs(t_c))) {
            return {t_c, s_c};
        }
        const int sign_c = s_c.y > 0.0 ? 1 : -1;
        if (sign_c == sign_a) {
            t_a = t_c;
            s_a = s_c;
        } else {
            t_b = t_c;
        }
        double t_next = t_c - s_c.y / s_c.vy;
        if (!(t_next > t_a && t_next < t_b)) t_next = 0.5 * (t_a + t_b);
        t_c = t_next;
    }
    s_c = integrate_to(s_a, mu, t_a, t_c, opts);
    return {t_c, s_c};
}

}  // namespace halotrace
