// Dense feedforward networks: tanh hidden layers, linear head, z-score
// input/output normalization frozen into the net, mini-batch SGD with
// momentum on the MSE loss, analytic backprop with a finite-difference
// checker, and exact JSON round-trips.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "agc/io.hpp"

namespace agc {

// Row-major sample matrix: one sample per row.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

    double* row(int i) { return a.data() + static_cast<size_t>(i) * cols; }
    const double* row(int i) const { return a.data() + static_cast<size_t>(i) * cols; }
    bool empty() const { return rows == 0; }
};

inline Matrix make_matrix(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return Matrix{};
    Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != static_cast<size_t>(m.cols))
            throw ValidationError("make_matrix: ragged rows");
        std::copy(rows[i].begin(), rows[i].end(), m.row(static_cast<int>(i)));
    }
    return m;
}

struct Net {
    std::vector<int> sizes;               // layer widths, e.g. {14, 64, 64, 4}
    std::vector<std::vector<double>> w;   // per layer, row-major [out][in]
    std::vector<std::vector<double>> b;   // per layer [out]
    std::vector<double> in_mean, in_std;  // per-feature input normalization
    std::vector<double> out_mean, out_std;

    int input_size() const { return sizes.front(); }
    int output_size() const { return sizes.back(); }
    int layers() const { return static_cast<int>(sizes.size()) - 1; }
};

// Uniform init scaled by 1/sqrt(fan_in); biases zero; identity normalization.
inline Net net_init(const std::vector<int>& sizes, std::uint64_t seed) {
    if (sizes.size() < 2) throw ValidationError("net_init: need at least input and output layer");
    for (int s : sizes)
        if (s < 1) throw ValidationError("net_init: zero-width layer");
    Net net;
    net.sizes = sizes;
    auto rng = make_rng(seed);
    for (size_t l = 0; l + 1 < sizes.size(); ++l) {
        const int fan_in = sizes[l];
        const int fan_out = sizes[l + 1];
        const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
        std::vector<double> wl(static_cast<size_t>(fan_out) * fan_in);
        for (double& v : wl) v = rand_uniform(rng, -scale, scale);
        net.w.push_back(std::move(wl));
        net.b.push_back(std::vector<double>(fan_out, 0.0));
    }
    net.in_mean.assign(sizes.front(), 0.0);
    net.in_std.assign(sizes.front(), 1.0);
    net.out_mean.assign(sizes.back(), 0.0);
    net.out_std.assign(sizes.back(), 1.0);
    return net;
}

// Per-feature z-score statistics from the training set, frozen into the net.
// Near-constant features get unit scale so shifts still cancel.
inline void fit_normalization(Net& net, const Matrix& X, const Matrix& Y) {
    if (X.rows < 1) throw ValidationError("fit_normalization: empty training set");
    if (X.cols != net.input_size() || Y.cols != net.output_size())
        throw ValidationError("fit_normalization: dimension mismatch");
    auto fit = [](const Matrix& M, std::vector<double>& mean, std::vector<double>& sd) {
        mean.assign(M.cols, 0.0);
        sd.assign(M.cols, 0.0);
        for (int i = 0; i < M.rows; ++i) {
            const double* r = M.row(i);
            for (int j = 0; j < M.cols; ++j) mean[j] += r[j];
        }
        for (double& m : mean) m /= M.rows;
        for (int i = 0; i < M.rows; ++i) {
            const double* r = M.row(i);
            for (int j = 0; j < M.cols; ++j) {
                const double d = r[j] - mean[j];
                sd[j] += d * d;
            }
        }
        for (double& v : sd) {
            v = std::sqrt(v / M.rows);
            if (!(v > 1e-12)) v = 1.0;
        }
    };
    fit(X, net.in_mean, net.in_std);
    fit(Y, net.out_mean, net.out_std);
}

struct NetWorkspace {
    std::vector<std::vector<double>> act;   // act[0] = normalized input, act[L] = normalized output
    std::vector<std::vector<double>> delta; // dL/d(pre-activation), per layer
};

inline void ensure_workspace(const Net& net, NetWorkspace& ws) {
    if (ws.act.size() == net.sizes.size()) return;
    ws.act.resize(net.sizes.size());
    ws.delta.resize(net.layers());
    for (size_t i = 0; i < net.sizes.size(); ++i) ws.act[i].assign(net.sizes[i], 0.0);
    for (int l = 0; l < net.layers(); ++l) ws.delta[l].assign(net.sizes[l + 1], 0.0);
}

// Normalized-space forward pass; leaves activations in the workspace.
inline const std::vector<double>& forward_normalized(const Net& net, const double* x,
                                                     NetWorkspace& ws) {
    ensure_workspace(net, ws);
    const int in = net.input_size();
    for (int j = 0; j < in; ++j) ws.act[0][j] = (x[j] - net.in_mean[j]) / net.in_std[j];
    const int L = net.layers();
    for (int l = 0; l < L; ++l) {
        const int n_in = net.sizes[l];
        const int n_out = net.sizes[l + 1];
        const double* wl = net.w[l].data();
        const double* bl = net.b[l].data();
        const double* prev = ws.act[l].data();
        double* out = ws.act[l + 1].data();
        for (int j = 0; j < n_out; ++j) {
            const double* wrow = wl + static_cast<size_t>(j) * n_in;
            double z = bl[j];
            for (int i = 0; i < n_in; ++i) z += wrow[i] * prev[i];
            out[j] = (l + 1 < L) ? std::tanh(z) : z;
        }
    }
    return ws.act.back();
}

inline std::vector<double> forward(const Net& net, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != net.input_size())
        throw ValidationError("forward: input dimension mismatch");
    NetWorkspace ws;
    const auto& yn = forward_normalized(net, x.data(), ws);
    std::vector<double> y(net.output_size());
    for (int k = 0; k < net.output_size(); ++k) y[k] = net.out_mean[k] + net.out_std[k] * yn[k];
    return y;
}

struct NetGrads {
    std::vector<std::vector<double>> w, b;
};

inline void zero_grads_like(const Net& net, NetGrads& g) {
    if (g.w.size() != net.w.size()) {
        g.w.resize(net.w.size());
        g.b.resize(net.b.size());
        for (size_t l = 0; l < net.w.size(); ++l) {
            g.w[l].assign(net.w[l].size(), 0.0);
            g.b[l].assign(net.b[l].size(), 0.0);
        }
    } else {
        for (auto& v : g.w) std::fill(v.begin(), v.end(), 0.0);
        for (auto& v : g.b) std::fill(v.begin(), v.end(), 0.0);
    }
}

// Backprop from a gradient w.r.t. the normalized output. Accumulates into
// `grads`; optionally returns the gradient w.r.t. the raw (unnormalized) input.
inline void backward_normalized(const Net& net, NetWorkspace& ws,
                                const std::vector<double>& dLdy_norm, NetGrads& grads,
                                std::vector<double>* dLdx_raw = nullptr) {
    const int L = net.layers();
    ws.delta[L - 1] = dLdy_norm; // linear head: d(pre-act) = d(output)
    for (int l = L - 1; l >= 0; --l) {
        const int n_in = net.sizes[l];
        const int n_out = net.sizes[l + 1];
        const double* prev = ws.act[l].data();
        const double* dl = ws.delta[l].data();
        double* gw = grads.w[l].data();
        double* gb = grads.b[l].data();
        for (int j = 0; j < n_out; ++j) {
            const double d = dl[j];
            gb[j] += d;
            double* grow = gw + static_cast<size_t>(j) * n_in;
            for (int i = 0; i < n_in; ++i) grow[i] += d * prev[i];
        }
        if (l > 0 || dLdx_raw) {
            std::vector<double>& down = (l > 0) ? ws.delta[l - 1] : *dLdx_raw;
            down.assign(n_in, 0.0);
            const double* wl = net.w[l].data();
            for (int j = 0; j < n_out; ++j) {
                const double d = dl[j];
                const double* wrow = wl + static_cast<size_t>(j) * n_in;
                for (int i = 0; i < n_in; ++i) down[i] += d * wrow[i];
            }
            if (l > 0) {
                // chain through tanh of the layer below
                const double* al = ws.act[l].data();
                for (int i = 0; i < n_in; ++i) down[i] *= (1.0 - al[i] * al[i]);
            } else {
                for (int i = 0; i < n_in; ++i) down[i] /= net.in_std[i];
            }
        }
    }
}

// Per-sample loss: mean over output dims of squared error in normalized space.
inline double sample_loss_and_grad(const Net& net, const double* x, const double* target,
                                   NetWorkspace& ws, std::vector<double>& dLdy) {
    const auto& yn = forward_normalized(net, x, ws);
    const int K = net.output_size();
    dLdy.assign(K, 0.0);
    double loss = 0.0;
    for (int k = 0; k < K; ++k) {
        const double tn = (target[k] - net.out_mean[k]) / net.out_std[k];
        const double e = yn[k] - tn;
        loss += e * e;
        dLdy[k] = 2.0 * e / K;
    }
    return loss / K;
}

// Mean normalized-space MSE over a dataset.
inline double mse_loss(const Net& net, const Matrix& X, const Matrix& Y) {
    if (X.rows != Y.rows || X.rows < 1) throw ValidationError("mse_loss: bad dataset shape");
    NetWorkspace ws;
    double total = 0.0;
    for (int i = 0; i < X.rows; ++i) {
        const auto& yn = forward_normalized(net, X.row(i), ws);
        const double* t = Y.row(i);
        double loss = 0.0;
        for (int k = 0; k < net.output_size(); ++k) {
            const double tn = (t[k] - net.out_mean[k]) / net.out_std[k];
            const double e = yn[k] - tn;
            loss += e * e;
        }
        total += loss / net.output_size();
    }
    return total / X.rows;
}

struct TrainOptions {
    double lr = 0.01;
    int epochs = 20;
    int batch = 32;
    std::uint64_t seed = 0;
    double momentum = 0.9;
    bool refit_normalization = true;
    double divergence_factor = 10.0;
    const Matrix* val_inputs = nullptr;
    const Matrix* val_targets = nullptr;
};

struct TrainReport {
    int epochs_run = 0;
    double final_train_loss = std::numeric_limits<double>::quiet_NaN();
    double final_val_loss = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> loss_curve;
    std::vector<double> val_curve;
};

inline TrainReport train_mse(Net& net, const Matrix& X, const Matrix& Y,
                             const TrainOptions& opts) {
    if (X.rows != Y.rows || X.rows < 1)
        throw ValidationError("train_mse: inputs and targets must be non-empty and aligned");
    if (X.cols != net.input_size() || Y.cols != net.output_size())
        throw ValidationError("train_mse: dimension mismatch with net");
    if (opts.batch < 1 || opts.epochs < 0) throw ValidationError("train_mse: bad options");

    if (opts.refit_normalization) fit_normalization(net, X, Y);

    NetWorkspace ws;
    NetGrads grads, vel;
    zero_grads_like(net, grads);
    zero_grads_like(net, vel);
    std::vector<double> dLdy;

    std::vector<int> order(X.rows);
    std::iota(order.begin(), order.end(), 0);
    auto rng = make_rng(opts.seed);

    TrainReport report;
    double running_avg = std::numeric_limits<double>::infinity();
    for (int epoch = 0; epoch < opts.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        int i = 0;
        while (i < X.rows) {
            const int bend = std::min(X.rows, i + opts.batch);
            const int bsize = bend - i;
            zero_grads_like(net, grads);
            for (; i < bend; ++i) {
                const int s = order[i];
                epoch_loss += sample_loss_and_grad(net, X.row(s), Y.row(s), ws, dLdy);
                backward_normalized(net, ws, dLdy, grads);
            }
            const double step = opts.lr / bsize;
            for (size_t l = 0; l < net.w.size(); ++l) {
                for (size_t k = 0; k < net.w[l].size(); ++k) {
                    vel.w[l][k] = opts.momentum * vel.w[l][k] - step * grads.w[l][k];
                    net.w[l][k] += vel.w[l][k];
                }
                for (size_t k = 0; k < net.b[l].size(); ++k) {
                    vel.b[l][k] = opts.momentum * vel.b[l][k] - step * grads.b[l][k];
                    net.b[l][k] += vel.b[l][k];
                }
            }
        }
        epoch_loss /= X.rows;
        if (!std::isfinite(epoch_loss))
            throw TrainingError("train_mse: non-finite loss at epoch " + std::to_string(epoch));
        // divergence guard: the running-average loss may never jump 10x
        const double new_avg = epoch == 0
                                   ? epoch_loss
                                   : (running_avg * epoch + epoch_loss) / (epoch + 1);
        if (epoch > 0 && new_avg > opts.divergence_factor * running_avg + 1e-12)
            throw TrainingError("train_mse: loss diverged at epoch " + std::to_string(epoch) +
                                " (running average " + std::to_string(running_avg) + " -> " +
                                std::to_string(new_avg) + ")");
        running_avg = new_avg;
        report.loss_curve.push_back(epoch_loss);
        if (opts.val_inputs && opts.val_targets && opts.val_inputs->rows > 0)
            report.val_curve.push_back(mse_loss(net, *opts.val_inputs, *opts.val_targets));
        ++report.epochs_run;
    }
    if (!report.loss_curve.empty()) report.final_train_loss = report.loss_curve.back();
    else report.final_train_loss = mse_loss(net, X, Y);
    if (!report.val_curve.empty()) report.final_val_loss = report.val_curve.back();
    return report;
}

// Max relative error between analytic and central finite-difference gradients
// of the per-sample MSE, over every weight and bias.
inline double gradient_check(const Net& net, const std::vector<double>& x,
                             const std::vector<double>& target, double eps) {
    if (!(eps > 0.0)) throw ValidationError("gradient_check: eps must be positive");
    Net n = net;
    NetWorkspace ws;
    NetGrads grads;
    zero_grads_like(n, grads);
    std::vector<double> dLdy;
    sample_loss_and_grad(n, x.data(), target.data(), ws, dLdy);
    backward_normalized(n, ws, dLdy, grads);

    auto loss_at = [&]() {
        NetWorkspace w2;
        std::vector<double> g2;
        return sample_loss_and_grad(n, x.data(), target.data(), w2, g2);
    };

    double max_err = 0.0;
    auto check_param = [&](double& p, double analytic) {
        const double orig = p;
        p = orig + eps;
        const double lp = loss_at();
        p = orig - eps;
        const double lm = loss_at();
        p = orig;
        const double numeric = (lp - lm) / (2.0 * eps);
        const double err = std::abs(analytic - numeric) /
                           std::max({1.0, std::abs(analytic), std::abs(numeric)});
        max_err = std::max(max_err, err);
    };
    for (size_t l = 0; l < n.w.size(); ++l) {
        for (size_t k = 0; k < n.w[l].size(); ++k) check_param(n.w[l][k], grads.w[l][k]);
        for (size_t k = 0; k < n.b[l].size(); ++k) check_param(n.b[l][k], grads.b[l][k]);
    }
    return max_err;
}

// --- serialization -------------------------------------------------------

inline nlohmann::json net_to_json(const Net& net) {
    return nlohmann::json{{"format", "net-v1"}, {"sizes", net.sizes},
                          {"weights", net.w},   {"biases", net.b},
                          {"in_mean", net.in_mean},   {"in_std", net.in_std},
                          {"out_mean", net.out_mean}, {"out_std", net.out_std}};
}

inline Net net_from_json(const nlohmann::json& j, const std::string& context) {
    require_format(j, "net-v1", context);
    try {
        Net net;
        j.at("sizes").get_to(net.sizes);
        j.at("weights").get_to(net.w);
        j.at("biases").get_to(net.b);
        j.at("in_mean").get_to(net.in_mean);
        j.at("in_std").get_to(net.in_std);
        j.at("out_mean").get_to(net.out_mean);
        j.at("out_std").get_to(net.out_std);
        if (net.sizes.size() < 2 || net.w.size() != net.sizes.size() - 1 ||
            net.b.size() != net.w.size())
            throw IoError(context + ": inconsistent layer structure");
        for (size_t l = 0; l + 1 < net.sizes.size(); ++l) {
            if (net.w[l].size() !=
                    static_cast<size_t>(net.sizes[l]) * static_cast<size_t>(net.sizes[l + 1]) ||
                net.b[l].size() != static_cast<size_t>(net.sizes[l + 1]))
                throw IoError(context + ": weight shape does not match sizes");
        }
        if (net.in_mean.size() != static_cast<size_t>(net.input_size()) ||
            net.in_std.size() != net.in_mean.size() ||
            net.out_mean.size() != static_cast<size_t>(net.output_size()) ||
            net.out_std.size() != net.out_mean.size())
            throw IoError(context + ": normalization vectors do not match sizes");
        return net;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(context + ": bad net document: " + e.what());
    }
}

inline void save_net(const Net& net, const std::filesystem::path& path) {
    save_json_file(path, net_to_json(net));
}

inline Net load_net(const std::filesystem::path& path) {
    return net_from_json(load_json_file(path), path.string());
}

}  // namespace agc
