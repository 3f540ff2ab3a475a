// Soft actor-critic for continuous setpoint control: squashed-Gaussian actor,
// twin critics with Polyak-averaged targets, automatic entropy-temperature
// tuning toward -dim(A), and a uniform replay buffer. Works against any
// environment exposing reset/step plus an action box; the twin simulator is
// wrapped as such an MDP below.
#pragma once

#include <numbers>
#include <optional>
#include <utility>

#include "agc/net.hpp"
#include "agc/twin.hpp"

namespace agc {

struct SacConfig {
    std::vector<int> actor_hidden = {64, 64};
    std::vector<int> critic_hidden = {64, 64};
    double gamma = 0.99;
    double polyak = 0.995;
    double lr = 3e-4;       // Adam, actor and critics
    double lr_alpha = 3e-4; // entropy temperature
    double init_alpha = 0.2;
    double target_entropy = 0.0; // 0 means -action_dim
    int buffer_capacity = 100000;
    int warmup_steps = 1000; // uniform-random exploration, also fits normalization
    int batch = 64;
    int update_every = 1;
    int total_steps = 20000;
    int eval_every = 2000;
    int eval_episodes = 1;
    // Per-step profit increments are fractions of a cent; scaling only affects
    // the optimization, never reported economics.
    double reward_scale = 100.0;
    double log_std_min = -5.0;
    double log_std_max = 2.0;
    std::uint64_t seed = 0;
};

inline void to_json(nlohmann::json& j, const SacConfig& c) {
    j = nlohmann::json{{"actor_hidden", c.actor_hidden},
                       {"critic_hidden", c.critic_hidden},
                       {"gamma", c.gamma},
                       {"polyak", c.polyak},
                       {"lr", c.lr},
                       {"lr_alpha", c.lr_alpha},
                       {"init_alpha", c.init_alpha},
                       {"target_entropy", c.target_entropy},
                       {"buffer_capacity", c.buffer_capacity},
                       {"warmup_steps", c.warmup_steps},
                       {"batch", c.batch},
                       {"update_every", c.update_every},
                       {"total_steps", c.total_steps},
                       {"eval_every", c.eval_every},
                       {"eval_episodes", c.eval_episodes},
                       {"reward_scale", c.reward_scale},
                       {"seed", c.seed}};
}

inline void from_json(const nlohmann::json& j, SacConfig& c) {
    SacConfig d;
    c.actor_hidden = j.value("actor_hidden", d.actor_hidden);
    c.critic_hidden = j.value("critic_hidden", d.critic_hidden);
    c.gamma = j.value("gamma", d.gamma);
    c.polyak = j.value("polyak", d.polyak);
    c.lr = j.value("lr", d.lr);
    c.lr_alpha = j.value("lr_alpha", d.lr_alpha);
    c.init_alpha = j.value("init_alpha", d.init_alpha);
    c.target_entropy = j.value("target_entropy", d.target_entropy);
    c.buffer_capacity = j.value("buffer_capacity", d.buffer_capacity);
    c.warmup_steps = j.value("warmup_steps", d.warmup_steps);
    c.batch = j.value("batch", d.batch);
    c.update_every = j.value("update_every", d.update_every);
    c.total_steps = j.value("total_steps", d.total_steps);
    c.eval_every = j.value("eval_every", d.eval_every);
    c.eval_episodes = j.value("eval_episodes", d.eval_episodes);
    c.reward_scale = j.value("reward_scale", d.reward_scale);
    c.seed = j.value("seed", d.seed);
}

struct Policy {
    Net actor; // state -> [mu, log_std] per action dim, pre-squash
    Net q1, q2;
    Net qt1, qt2; // Polyak targets
    double log_alpha = 0.0;
    double log_std_min = -5.0;
    double log_std_max = 2.0;
    std::vector<double> act_lo, act_hi;

    int state_dim() const { return actor.input_size(); }
    int action_dim() const { return static_cast<int>(act_lo.size()); }
    double alpha() const { return std::exp(log_alpha); }
};

struct EnvStep {
    std::vector<double> state;
    double reward = 0.0;
    bool done = false;
};

namespace detail {

inline double squash_dim(double u, double lo, double hi) {
    return lo + (hi - lo) * (std::tanh(u) + 1.0) * 0.5;
}

// Adam over a net's parameters, fed by the shared backprop gradients.
struct AdamState {
    NetGrads m, v;
    long long t = 0;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

    void step(Net& net, const NetGrads& g, double lr) {
        if (m.w.empty()) {
            zero_grads_like(net, m);
            zero_grads_like(net, v);
        }
        ++t;
        const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
        const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
        auto upd = [&](std::vector<double>& p, std::vector<double>& mm, std::vector<double>& vv,
                       const std::vector<double>& gg) {
            for (size_t k = 0; k < p.size(); ++k) {
                mm[k] = beta1 * mm[k] + (1.0 - beta1) * gg[k];
                vv[k] = beta2 * vv[k] + (1.0 - beta2) * gg[k] * gg[k];
                p[k] -= lr * (mm[k] / c1) / (std::sqrt(vv[k] / c2) + eps);
            }
        };
        for (size_t l = 0; l < net.w.size(); ++l) {
            upd(net.w[l], m.w[l], v.w[l], g.w[l]);
            upd(net.b[l], m.b[l], v.b[l], g.b[l]);
        }
    }
};

struct ReplayBuffer {
    int capacity = 0, sdim = 0, adim = 0;
    Matrix s, a, s2;
    std::vector<double> r;
    std::vector<std::uint8_t> done;
    int size = 0, head = 0;

    ReplayBuffer(int cap, int state_dim, int action_dim)
        : capacity(cap), sdim(state_dim), adim(action_dim), s(cap, state_dim),
          a(cap, action_dim), s2(cap, state_dim), r(cap, 0.0), done(cap, 0) {}

    void push(const std::vector<double>& st, const std::vector<double>& act, double rew,
              const std::vector<double>& st2, bool dn) {
        std::copy(st.begin(), st.end(), s.row(head));
        std::copy(act.begin(), act.end(), a.row(head));
        std::copy(st2.begin(), st2.end(), s2.row(head));
        r[head] = rew;
        done[head] = dn ? 1 : 0;
        head = (head + 1) % capacity;
        size = std::min(size + 1, capacity);
    }
};

}  // namespace detail

// Draws an action from the policy; deterministic mode squashes the mean.
// Always lands inside the action box.
inline std::vector<double> policy_act(const Policy& policy, const std::vector<double>& state,
                                      bool deterministic, std::mt19937_64& rng) {
    if (static_cast<int>(state.size()) != policy.state_dim())
        throw ValidationError("policy_act: state dimension mismatch");
    const auto out = forward(policy.actor, state);
    const int A = policy.action_dim();
    std::vector<double> action(A);
    for (int d = 0; d < A; ++d) {
        double u = out[d];
        if (!deterministic) {
            const double log_std = clamp(out[A + d], policy.log_std_min, policy.log_std_max);
            u += std::exp(log_std) * rand_normal(rng);
        }
        action[d] = detail::squash_dim(u, policy.act_lo[d], policy.act_hi[d]);
    }
    return action;
}

struct SacResult {
    Policy policy;
    // (env step, mean deterministic evaluation return), unscaled rewards
    std::vector<std::pair<int, double>> return_curve;
};

template <class Env>
double evaluate_policy(const Policy& policy, Env& env, int episodes, std::uint64_t seed) {
    auto rng = make_rng(seed);
    double total = 0.0;
    for (int e = 0; e < episodes; ++e) {
        auto obs = env.reset(rng);
        bool done = false;
        while (!done) {
            const auto act = policy_act(policy, obs, true, rng);
            EnvStep st = env.step(act, rng);
            total += st.reward;
            obs = std::move(st.state);
            done = st.done;
        }
    }
    return total / episodes;
}

template <class Env>
SacResult sac_train(Env& env, const SacConfig& cfg, const Policy* warm_start = nullptr) {
    const int S = env.state_dim();
    const int A = env.action_dim();
    const std::vector<double> lo = env.action_lo();
    const std::vector<double> hi = env.action_hi();
    if (static_cast<int>(lo.size()) != A || static_cast<int>(hi.size()) != A)
        throw ValidationError("sac_train: action bound size mismatch");
    if (cfg.batch < 1 || cfg.total_steps < 1 || cfg.buffer_capacity < cfg.batch)
        throw ValidationError("sac_train: bad configuration");
    const double target_entropy =
        cfg.target_entropy != 0.0 ? cfg.target_entropy : -static_cast<double>(A);

    auto widths = [](int in, const std::vector<int>& hidden, int out) {
        std::vector<int> s{in};
        s.insert(s.end(), hidden.begin(), hidden.end());
        s.push_back(out);
        return s;
    };

    Policy pol;
    if (warm_start) {
        pol = *warm_start;
        if (pol.state_dim() != S || pol.action_dim() != A)
            throw ValidationError("sac_train: warm-start policy does not match env");
    } else {
        pol.actor = net_init(widths(S, cfg.actor_hidden, 2 * A), split_seed(cfg.seed, 1));
        pol.q1 = net_init(widths(S + A, cfg.critic_hidden, 1), split_seed(cfg.seed, 2));
        pol.q2 = net_init(widths(S + A, cfg.critic_hidden, 1), split_seed(cfg.seed, 3));
        pol.qt1 = pol.q1;
        pol.qt2 = pol.q2;
        pol.log_alpha = std::log(std::max(1e-8, cfg.init_alpha));
        pol.log_std_min = cfg.log_std_min;
        pol.log_std_max = cfg.log_std_max;
        pol.act_lo = lo;
        pol.act_hi = hi;
    }

    detail::ReplayBuffer buf(cfg.buffer_capacity, S, A);
    detail::AdamState adam_q1, adam_q2, adam_actor;
    auto rng_env = make_rng(split_seed(cfg.seed, 10));
    auto rng_upd = make_rng(split_seed(cfg.seed, 11));

    NetWorkspace ws_a, ws_q1, ws_q2, ws_t;
    NetGrads g_q1, g_q2, g_actor, scratch;
    zero_grads_like(pol.q1, g_q1);
    zero_grads_like(pol.q2, g_q2);
    zero_grads_like(pol.actor, g_actor);

    // sample a' ~ pi(s') and its log-prob; writes the squashed action into `qx` after the state
    auto sample_action_into = [&](const Net& actor, const double* state, std::vector<double>& qx,
                                  std::mt19937_64& rng) {
        const auto& out = forward_normalized(actor, state, ws_a);
        double logp = 0.0;
        for (int d = 0; d < A; ++d) {
            // actor outputs are in normalized space with identity output stats
            const double mu = out[d];
            const double log_std = clamp(out[A + d], pol.log_std_min, pol.log_std_max);
            const double eps = rand_normal(rng);
            const double u = mu + std::exp(log_std) * eps;
            const double th = std::tanh(u);
            qx[S + d] = lo[d] + (hi[d] - lo[d]) * (th + 1.0) * 0.5;
            logp += -0.5 * eps * eps - log_std - 0.5 * std::log(2.0 * std::numbers::pi) -
                    std::log((hi[d] - lo[d]) * 0.5 * (1.0 - th * th) + 1e-6);
        }
        return logp;
    };

    auto q_forward = [&](const Net& q, const std::vector<double>& qx, NetWorkspace& ws) {
        const auto& yn = forward_normalized(q, qx.data(), ws);
        return q.out_mean[0] + q.out_std[0] * yn[0];
    };

    SacResult result;
    auto obs = env.reset(rng_env);
    double alpha = pol.alpha();
    std::vector<double> qx(S + A), qx2(S + A), dldy(1), dqda(S + A);

    for (int step = 1; step <= cfg.total_steps; ++step) {
        // act
        std::vector<double> act(A);
        if (step <= cfg.warmup_steps && !warm_start) {
            for (int d = 0; d < A; ++d) act[d] = rand_uniform(rng_env, lo[d], hi[d]);
        } else {
            act = policy_act(pol, obs, false, rng_env);
        }
        EnvStep tr = env.step(act, rng_env);
        buf.push(obs, act, tr.reward * cfg.reward_scale, tr.state, tr.done);
        obs = tr.done ? env.reset(rng_env) : std::move(tr.state);

        // freeze input normalization from the exploration data
        if (step == cfg.warmup_steps && !warm_start) {
            Matrix states(buf.size, S), dummy_s(buf.size, 2 * A);
            Matrix qin(buf.size, S + A), dummy_q(buf.size, 1);
            for (int i = 0; i < buf.size; ++i) {
                std::copy(buf.s.row(i), buf.s.row(i) + S, states.row(i));
                std::copy(buf.s.row(i), buf.s.row(i) + S, qin.row(i));
                std::copy(buf.a.row(i), buf.a.row(i) + A, qin.row(i) + S);
            }
            fit_normalization(pol.actor, states, dummy_s);
            pol.actor.out_mean.assign(2 * A, 0.0);
            pol.actor.out_std.assign(2 * A, 1.0);
            fit_normalization(pol.q1, qin, dummy_q);
            pol.q1.out_mean = {0.0};
            pol.q1.out_std = {1.0};
            pol.q2.in_mean = pol.q1.in_mean;
            pol.q2.in_std = pol.q1.in_std;
            pol.qt1 = pol.q1;
            pol.qt2 = pol.q2;
        }

        if (step > cfg.warmup_steps && buf.size >= cfg.batch && step % cfg.update_every == 0) {
            // --- targets ---
            std::vector<int> idx(cfg.batch);
            for (int& i : idx)
                i = std::uniform_int_distribution<int>(0, buf.size - 1)(rng_upd);
            std::vector<double> target(cfg.batch);
            for (int b = 0; b < cfg.batch; ++b) {
                const int i = idx[b];
                double y = buf.r[i];
                if (!buf.done[i]) {
                    std::copy(buf.s2.row(i), buf.s2.row(i) + S, qx2.begin());
                    const double logp = sample_action_into(pol.actor, buf.s2.row(i), qx2, rng_upd);
                    const double q = std::min(q_forward(pol.qt1, qx2, ws_t),
                                              q_forward(pol.qt2, qx2, ws_t));
                    y += cfg.gamma * (q - alpha * logp);
                }
                if (!std::isfinite(y))
                    throw TrainingError("sac_train: non-finite critic target");
                target[b] = y;
            }

            // --- critic regression ---
            zero_grads_like(pol.q1, g_q1);
            zero_grads_like(pol.q2, g_q2);
            double critic_loss = 0.0;
            for (int b = 0; b < cfg.batch; ++b) {
                const int i = idx[b];
                std::copy(buf.s.row(i), buf.s.row(i) + S, qx.begin());
                std::copy(buf.a.row(i), buf.a.row(i) + A, qx.begin() + S);
                const double q1v = q_forward(pol.q1, qx, ws_q1);
                dldy[0] = 2.0 * (q1v - target[b]) / cfg.batch;
                backward_normalized(pol.q1, ws_q1, dldy, g_q1);
                const double q2v = q_forward(pol.q2, qx, ws_q2);
                dldy[0] = 2.0 * (q2v - target[b]) / cfg.batch;
                backward_normalized(pol.q2, ws_q2, dldy, g_q2);
                critic_loss += (q1v - target[b]) * (q1v - target[b]) +
                               (q2v - target[b]) * (q2v - target[b]);
            }
            if (!std::isfinite(critic_loss))
                throw TrainingError("sac_train: non-finite critic loss");
            adam_q1.step(pol.q1, g_q1, cfg.lr);
            adam_q2.step(pol.q2, g_q2, cfg.lr);

            // --- actor and temperature ---
            zero_grads_like(pol.actor, g_actor);
            double logp_acc = 0.0;
            std::vector<double> actor_out_grad(2 * A);
            for (int b = 0; b < cfg.batch; ++b) {
                const int i = idx[b];
                const auto& aout = forward_normalized(pol.actor, buf.s.row(i), ws_a);
                std::copy(buf.s.row(i), buf.s.row(i) + S, qx.begin());
                double logp = 0.0;
                std::vector<double> u(A), th(A), sigma(A), epsv(A);
                std::vector<bool> std_clipped(A);
                for (int d = 0; d < A; ++d) {
                    const double mu = aout[d];
                    const double raw = aout[A + d];
                    const double log_std = clamp(raw, pol.log_std_min, pol.log_std_max);
                    std_clipped[d] = raw != log_std;
                    sigma[d] = std::exp(log_std);
                    epsv[d] = rand_normal(rng_upd);
                    u[d] = mu + sigma[d] * epsv[d];
                    th[d] = std::tanh(u[d]);
                    qx[S + d] = lo[d] + (hi[d] - lo[d]) * (th[d] + 1.0) * 0.5;
                    logp += -0.5 * epsv[d] * epsv[d] - log_std -
                            0.5 * std::log(2.0 * std::numbers::pi) -
                            std::log((hi[d] - lo[d]) * 0.5 * (1.0 - th[d] * th[d]) + 1e-6);
                }
                logp_acc += logp;

                // dQ/da through the smaller critic; its parameter grads are discarded
                const double q1v = q_forward(pol.q1, qx, ws_q1);
                const double q2v = q_forward(pol.q2, qx, ws_q2);
                const Net& qmin = q1v <= q2v ? pol.q1 : pol.q2;
                NetWorkspace& ws_min = q1v <= q2v ? ws_q1 : ws_q2;
                zero_grads_like(qmin, scratch);
                dldy[0] = 1.0;
                backward_normalized(qmin, ws_min, dldy, scratch, &dqda);

                for (int d = 0; d < A; ++d) {
                    const double dsquash = (hi[d] - lo[d]) * 0.5 * (1.0 - th[d] * th[d]);
                    // d/du of -log(dsquash + eps); approaches 2*tanh(u) as eps -> 0
                    const double dlogp_du = 2.0 * th[d] * dsquash / (dsquash + 1e-6);
                    // loss per sample: (alpha * logp - qmin) / batch
                    const double dl_du = (alpha * dlogp_du - dqda[S + d] * dsquash) / cfg.batch;
                    actor_out_grad[d] = dl_du;
                    actor_out_grad[A + d] =
                        std_clipped[d] ? 0.0
                                       : dl_du * sigma[d] * epsv[d] - alpha / cfg.batch;
                }
                backward_normalized(pol.actor, ws_a, actor_out_grad, g_actor);
            }
            adam_actor.step(pol.actor, g_actor, cfg.lr);

            pol.log_alpha += cfg.lr_alpha * (logp_acc / cfg.batch + target_entropy);
            pol.log_alpha = clamp(pol.log_alpha, -10.0, 4.0);
            alpha = pol.alpha();

            // --- Polyak targets ---
            auto polyak = [&](Net& t, const Net& src) {
                for (size_t l = 0; l < t.w.size(); ++l) {
                    for (size_t k = 0; k < t.w[l].size(); ++k)
                        t.w[l][k] = cfg.polyak * t.w[l][k] + (1.0 - cfg.polyak) * src.w[l][k];
                    for (size_t k = 0; k < t.b[l].size(); ++k)
                        t.b[l][k] = cfg.polyak * t.b[l][k] + (1.0 - cfg.polyak) * src.b[l][k];
                }
            };
            polyak(pol.qt1, pol.q1);
            polyak(pol.qt2, pol.q2);
        }

        if (cfg.eval_every > 0 && step % cfg.eval_every == 0) {
            const double ret =
                evaluate_policy(pol, env, cfg.eval_episodes, split_seed(cfg.seed, 900 + step));
            result.return_curve.emplace_back(step, ret);
            obs = env.reset(rng_env);
        }
    }

    result.policy = std::move(pol);
    return result;
}

// --- the twin simulator as an MDP ------------------------------------------

// Observation: the 14 observable factors plus hour-of-day (sin, cos) and
// season progress. Episode reward stream is the net-profit telescoping of the
// underlying rollout, so the undiscounted return equals final net profit.
class TwinMdpEnv {
public:
    TwinMdpEnv(const TwinSimulator& sim, std::vector<Weather> weather, State initial,
               EconConfig econ, ActionBounds bounds, int horizon_hours)
        : sim_(&sim), weather_(std::move(weather)), initial_(initial), econ_(econ),
          bounds_(bounds), horizon_(horizon_hours) {
        check_arities(sim);
        if (horizon_ < 1 || static_cast<size_t>(horizon_) > weather_.size())
            throw ValidationError("TwinMdpEnv: horizon must fit the weather series");
    }

    int state_dim() const { return kObservableDim + 3; }
    int action_dim() const { return 4; }
    std::vector<double> action_lo() const { return bounds_.lows(); }
    std::vector<double> action_hi() const { return bounds_.highs(); }

    std::vector<double> reset(std::mt19937_64&) {
        cursor_.emplace(TwinDynamics{sim_}, weather_, initial_, econ_, bounds_, horizon_);
        return features();
    }

    EnvStep step(const std::vector<double>& action, std::mt19937_64&) {
        if (!cursor_ || cursor_->done())
            throw ValidationError("TwinMdpEnv: step before reset or past horizon");
        EnvStep out;
        out.reward = cursor_->step(action_from(action.data()));
        out.state = features();
        out.done = cursor_->done();
        return out;
    }

private:
    std::vector<double> features() const {
        const State& s = cursor_->state();
        std::vector<double> f = state_observables(s);
        f.push_back(std::sin(2.0 * std::numbers::pi * s.hour_of_day / 24.0));
        f.push_back(std::cos(2.0 * std::numbers::pi * s.hour_of_day / 24.0));
        f.push_back(static_cast<double>(cursor_->step_index()) / horizon_);
        return f;
    }

    const TwinSimulator* sim_;
    std::vector<Weather> weather_;
    State initial_;
    EconConfig econ_;
    ActionBounds bounds_;
    int horizon_;
    std::optional<RolloutCursor<TwinDynamics>> cursor_;
};

// --- policy bundle I/O ------------------------------------------------------

inline void save_policy(const Policy& p, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    save_net(p.actor, dir / "actor.json");
    save_net(p.q1, dir / "q1.json");
    save_net(p.q2, dir / "q2.json");
    save_net(p.qt1, dir / "qt1.json");
    save_net(p.qt2, dir / "qt2.json");
    nlohmann::json manifest{{"format", "policy-v1"},
                            {"log_alpha", p.log_alpha},
                            {"log_std_min", p.log_std_min},
                            {"log_std_max", p.log_std_max},
                            {"act_lo", p.act_lo},
                            {"act_hi", p.act_hi}};
    save_json_file(dir / "manifest.json", manifest, 2);
}

inline Policy load_policy(const std::filesystem::path& dir) {
    const auto manifest = load_json_file(dir / "manifest.json");
    require_format(manifest, "policy-v1", (dir / "manifest.json").string());
    Policy p;
    p.log_alpha = manifest.at("log_alpha").get<double>();
    p.log_std_min = manifest.at("log_std_min").get<double>();
    p.log_std_max = manifest.at("log_std_max").get<double>();
    manifest.at("act_lo").get_to(p.act_lo);
    manifest.at("act_hi").get_to(p.act_hi);
    p.actor = load_net(dir / "actor.json");
    p.q1 = load_net(dir / "q1.json");
    p.q2 = load_net(dir / "q2.json");
    p.qt1 = load_net(dir / "qt1.json");
    p.qt2 = load_net(dir / "qt2.json");
    return p;
}

}  // namespace agc
