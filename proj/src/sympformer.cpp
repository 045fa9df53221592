#include "sympdyn/sympformer.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "sympdyn/error.hpp"
#include "sympdyn/kernels.hpp"
#include "sympdyn/kv.hpp"
#include "sympdyn/rng.hpp"

static_assert(std::endian::native == std::endian::little,
              "weight container I/O assumes a little-endian host");

namespace sympdyn::sympformer {

const char* method_name(Method m) {
    switch (m) {
        case Method::PlainEuler: return "plain-euler";
        case Method::ConformalEuler: return "conformal-euler";
        case Method::ExpEuler: return "exp-euler";
    }
    return "?";
}

const char* attention_name(AttentionKind k) {
    return k == AttentionKind::Softmax ? "softmax" : "linear";
}

Method parse_method(const std::string& s) {
    if (s == "plain-euler") return Method::PlainEuler;
    if (s == "conformal-euler") return Method::ConformalEuler;
    if (s == "exp-euler") return Method::ExpEuler;
    throw ParseError("unknown sympformer method '" + s + "'");
}

AttentionKind parse_attention(const std::string& s) {
    if (s == "softmax") return AttentionKind::Softmax;
    if (s == "linear") return AttentionKind::Linear;
    throw ParseError("unknown attention kind '" + s + "'");
}

// ------------------------------ config -------------------------------------

SympFormerConfig SympFormerConfig::make(std::size_t layers, std::size_t n_heads, std::size_t dim,
                                        std::size_t seq_len, std::size_t vocab) {
    SympFormerConfig cfg;
    cfg.layers = layers;
    cfg.n_heads = n_heads;
    cfg.dim = dim;
    cfg.seq_len = seq_len;
    cfg.vocab = vocab;
    cfg.h_x.assign(layers, 0.1);
    cfg.h_y.assign(layers, 0.1);
    cfg.m_mlp.assign(layers, 0.5);
    cfg.beta_mlp.assign(layers, 0.5);
    cfg.gamma_mlp.assign(layers, 1.0);
    cfg.alpha_plain.assign(layers, 0.9);
    return cfg;
}

void SympFormerConfig::validate() const {
    if (layers < 0 + 0u) {} // layers == 0 is legal (empty block stack)
    if (n_heads < 1 || dim < 1 || seq_len < 1 || vocab < 2)
        throw DomainError("sympformer config: need n_heads, dim, seq_len >= 1 and vocab >= 2");
    if (dim % n_heads != 0)
        throw DomainError("sympformer config: dim must be divisible by n_heads");
    auto need = [&](const std::vector<double>& v, const char* name) {
        if (v.size() != layers)
            throw DomainError(std::string("sympformer config: ") + name + " needs one entry per layer");
    };
    need(h_x, "h_x");
    need(h_y, "h_y");
    need(m_mlp, "m_mlp");
    need(beta_mlp, "beta_mlp");
    need(gamma_mlp, "gamma_mlp");
    need(alpha_plain, "alpha_plain");
    for (std::size_t l = 0; l < layers; ++l) {
        if (!(h_x[l] > 0.0) || !(h_y[l] > 0.0))
            throw DomainError("sympformer config: step sizes must be positive");
        if (!(m_mlp[l] > 0.0 && m_mlp[l] < 1.0) || !(beta_mlp[l] > 0.0 && beta_mlp[l] < 1.0))
            throw DomainError("sympformer config: m_mlp and beta_mlp must lie in (0, 1)");
        if (!(gamma_mlp[l] > 0.0))
            throw DomainError("sympformer config: gamma_mlp must be positive");
        if (!(alpha_plain[l] > 0.0 && alpha_plain[l] < 1.0))
            throw DomainError("sympformer config: alpha_plain must lie in (0, 1)");
    }
    if (!(c_log > 0.0) || !(c_lin > 0.0))
        throw DomainError("sympformer config: c_log and c_lin must be positive");
    if (!(t0 > 0.0)) throw DomainError("sympformer config: t0 must be positive");
}

// ------------------------------ weights ------------------------------------

ModelWeights ModelWeights::random_init(const SympFormerConfig& cfg, std::uint64_t seed) {
    CounterRng rng(seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.dim));
    const std::size_t hd = cfg.dim / cfg.n_heads;

    ModelWeights w;
    w.tok_emb = gaussian_matrix(rng, cfg.vocab, cfg.dim, scale);
    w.pos_emb = gaussian_matrix(rng, cfg.seq_len, cfg.dim, scale);
    w.ln_f_gain.assign(cfg.dim, 1.0);
    w.w_lm = gaussian_matrix(rng, cfg.vocab, cfg.dim, scale);
    w.layers.resize(cfg.layers);
    for (auto& lw : w.layers) {
        lw.q.reserve(cfg.n_heads);
        lw.k.reserve(cfg.n_heads);
        lw.v.reserve(cfg.n_heads);
        for (std::size_t h = 0; h < cfg.n_heads; ++h) {
            lw.q.push_back(gaussian_matrix(rng, hd, cfg.dim, scale));
            lw.k.push_back(gaussian_matrix(rng, hd, cfg.dim, scale));
            lw.v.push_back(gaussian_matrix(rng, cfg.dim, cfg.dim, scale));
        }
        lw.mlp_in = gaussian_matrix(rng, 4 * cfg.dim, cfg.dim, scale);
        lw.mlp_out = gaussian_matrix(rng, cfg.dim, 4 * cfg.dim, scale);
        lw.ln_gain.assign(cfg.dim, 1.0);
        lw.ln_y_gain.assign(cfg.dim, 1.0);
        lw.ln_v_gain.assign(cfg.dim, 1.0);
    }
    return w;
}

void ModelWeights::validate_shapes(const SympFormerConfig& cfg) const {
    const std::size_t hd = cfg.dim / cfg.n_heads;
    auto check = [](bool ok, const std::string& what) {
        if (!ok) throw DimensionError("sympformer weights: bad shape for " + what);
    };
    check(tok_emb.rows() == cfg.vocab && tok_emb.cols() == cfg.dim, "tok_emb");
    check(pos_emb.rows() == cfg.seq_len && pos_emb.cols() == cfg.dim, "pos_emb");
    check(ln_f_gain.size() == cfg.dim, "ln_f");
    check(w_lm.rows() == cfg.vocab && w_lm.cols() == cfg.dim, "w_lm");
    check(layers.size() == cfg.layers, "layer count");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const LayerWeights& lw = layers[l];
        const std::string tag = "layer" + std::to_string(l);
        check(lw.q.size() == cfg.n_heads && lw.k.size() == cfg.n_heads &&
                  lw.v.size() == cfg.n_heads,
              tag + " head count");
        for (std::size_t h = 0; h < cfg.n_heads; ++h) {
            check(lw.q[h].rows() == hd && lw.q[h].cols() == cfg.dim, tag + ".q");
            check(lw.k[h].rows() == hd && lw.k[h].cols() == cfg.dim, tag + ".k");
            check(lw.v[h].rows() == cfg.dim && lw.v[h].cols() == cfg.dim, tag + ".v");
        }
        check(lw.mlp_in.rows() == 4 * cfg.dim && lw.mlp_in.cols() == cfg.dim, tag + ".mlp_in");
        check(lw.mlp_out.rows() == cfg.dim && lw.mlp_out.cols() == 4 * cfg.dim, tag + ".mlp_out");
        check(lw.ln_gain.size() == cfg.dim && lw.ln_y_gain.size() == cfg.dim &&
                  lw.ln_v_gain.size() == cfg.dim,
              tag + " layer norms");
    }
}

// ------------------------------ operations ---------------------------------

ZetaCoeffs zeta_coeffs(Method method, double c_log, double c_lin, double t_k, double h_y,
                       double learned_alpha) {
    if (h_y < 0.0) throw DomainError("zeta_coeffs: h_y must be non-negative");
    switch (method) {
        case Method::PlainEuler: {
            if (!(learned_alpha > 0.0 && learned_alpha < 1.0))
                throw DomainError("zeta_coeffs: plain-Euler alpha must lie in (0, 1)");
            return {learned_alpha, 1.0};
        }
        case Method::ConformalEuler: {
            if (!(t_k > 0.0)) throw DomainError("zeta_coeffs: t_k must be positive");
            const double a = c_log / t_k + c_lin;
            return {1.0 - a * h_y, 1.0};
        }
        case Method::ExpEuler: {
            if (!(t_k > 0.0)) throw DomainError("zeta_coeffs: t_k must be positive");
            const double d_eta = c_log * std::log((t_k + h_y) / t_k) + c_lin * h_y;
            if (d_eta == 0.0) return {1.0, h_y};
            // zeta2 = (1 - e^{-d_eta}) / (d_eta / h_y), continuous at d_eta = 0
            return {std::exp(-d_eta), h_y * (-std::expm1(-d_eta)) / d_eta};
        }
    }
    return {};
}

Matrix layer_norm(const Matrix& x, const std::vector<double>& gain) {
    if (gain.size() != x.cols()) throw DimensionError("layer_norm: gain length mismatch");
    constexpr double eps = 1e-5;
    Matrix out(x.rows(), x.cols());
    const double d = static_cast<double>(x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double mean = 0.0;
        for (std::size_t j = 0; j < x.cols(); ++j) mean += x(i, j);
        mean /= d;
        double var = 0.0;
        for (std::size_t j = 0; j < x.cols(); ++j) {
            const double c = x(i, j) - mean;
            var += c * c;
        }
        var /= d;
        const double inv = 1.0 / std::sqrt(var + eps);
        for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = gain[j] * (x(i, j) - mean) * inv;
    }
    return out;
}

namespace {

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + transpose(m)); }

// Effective single-kernel weights: scores averaged across heads (equivalently
// the head A-matrices), value matrices symmetrized and averaged.
AttentionWeights effective_weights(const LayerWeights& lw) {
    const std::size_t heads = lw.q.size();
    const std::size_t d = lw.q[0].cols();
    Matrix a_bar(d, d), v_bar(d, d);
    for (std::size_t h = 0; h < heads; ++h) {
        a_bar += AttentionWeights::symmetrized_score_matrix(lw.k[h], lw.q[h]);
        v_bar += symmetrize(lw.v[h]);
    }
    const double inv = 1.0 / static_cast<double>(heads);
    return AttentionWeights::from_matrices(inv * a_bar, inv * v_bar);
}

// Causal softmax fields: masked scores M_{ij} (j <= i), prefix row sums in the
// normalizers and in R; the leading N factors are kept as in the full system.
dynamics::FieldPair causal_softmax_fields(const Matrix& x, const Matrix& y,
                                          const AttentionWeights& w, double guard) {
    const std::size_t n = x.rows();
    const double dn = static_cast<double>(n);
    const Matrix s = mul_nt(x * w.a(), x);
    Matrix m(n, n);
    std::vector<double> rowsum(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            if (!(s(i, j) <= guard)) throw ScoreOverflowError(i, j, s(i, j), guard);
            m(i, j) = std::exp(s(i, j));
            rowsum[i] += m(i, j);
        }
    }

    const Matrix ybt = mul_nt(y, w.b());
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double bn = kernels::ops().dot(y.row(i), ybt.row(i), y.cols());
        r[i] = bn / (rowsum[i] * rowsum[i]);
    }

    dynamics::FieldPair out;
    out.F = ybt;
    std::vector<double> scale(n);
    for (std::size_t i = 0; i < n; ++i) scale[i] = dn / rowsum[i];
    kernels::ops().scale_rows(out.F.data(), scale.data(), n, y.cols());

    Matrix wmat(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) wmat(i, j) = m(i, j) * (r[i] + r[j] + 2.0);
    out.G = (0.5 * dn) * ((wmat * x) * w.a());
    return out;
}

// Causal linear fields: pairwise sums restricted to j <= i.
dynamics::FieldPair causal_linear_fields(const Matrix& x, const Matrix& y,
                                         const AttentionWeights& w) {
    const std::size_t n = x.rows();
    const double inv_n = 1.0 / static_cast<double>(n);
    Matrix s = mul_nt(x * w.a(), x); // X A X^T
    Matrix gram = mul_nt(y, y);      // Y Y^T
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            s(i, j) = 0.0;
            gram(i, j) = 0.0;
        }
    dynamics::FieldPair out;
    out.F = inv_n * (s * y);
    out.G = x * w.v() - inv_n * ((gram * x) * w.a());
    return out;
}

} // namespace

dynamics::FieldPair attention_oracle(const Matrix& x, const Matrix& y, const LayerWeights& lw,
                                     const SympFormerConfig& cfg) {
    const AttentionWeights w = effective_weights(lw);
    if (cfg.attention == AttentionKind::Softmax) {
        if (cfg.causal) return causal_softmax_fields(x, y, w, dynamics::kDefaultScoreGuard);
        return dynamics::softmax_fields(Ensemble(x, y, 0.0), w);
    }
    if (cfg.causal) return causal_linear_fields(x, y, w);
    return dynamics::linear_fields(Ensemble(x, y, 0.0), w);
}

namespace {

double gelu(double u) { return 0.5 * u * (1.0 + std::erf(u * 0.70710678118654752440)); }

Matrix mlp(const Matrix& x, const LayerWeights& lw) {
    Matrix hidden = mul_nt(x, lw.mlp_in);
    for (std::size_t i = 0; i < hidden.size(); ++i) hidden.data()[i] = gelu(hidden.data()[i]);
    return mul_nt(hidden, lw.mlp_out);
}

} // namespace

BlockState layer_forward(const BlockState& state, std::size_t layer, const ModelWeights& weights,
                         const SympFormerConfig& cfg) {
    if (layer >= cfg.layers) throw DomainError("layer_forward: layer index out of range");
    const LayerWeights& lw = weights.layers[layer];

    const dynamics::FieldPair fg = attention_oracle(state.x, state.y, lw, cfg);
    const ZetaCoeffs z = zeta_coeffs(cfg.method, cfg.c_log, cfg.c_lin, state.t, cfg.h_y[layer],
                                     cfg.alpha_plain[layer]);

    BlockState next;
    next.y = z.zeta1 * state.y + (cfg.h_y[layer] * z.zeta2) * fg.G;
    Matrix x_half = state.x + cfg.h_x[layer] * fg.F; // simultaneous update: F at the old y

    const Matrix y_half = layer_norm(next.y, lw.ln_y_gain);
    const Matrix x_tilde = layer_norm(x_half, lw.ln_gain) + cfg.m_mlp[layer] * y_half;
    const Matrix d = mlp(x_tilde, lw);
    next.y = layer_norm(cfg.beta_mlp[layer] * y_half + cfg.gamma_mlp[layer] * d, lw.ln_v_gain);
    next.x = x_half + next.y;
    next.t = state.t + cfg.h_x[layer];
    return next;
}

std::vector<Matrix> forward(const std::vector<std::vector<long>>& tokens,
                            const ModelWeights& weights, const SympFormerConfig& cfg) {
    cfg.validate();
    weights.validate_shapes(cfg);

    std::vector<Matrix> logits;
    logits.reserve(tokens.size());
    for (std::size_t b = 0; b < tokens.size(); ++b) {
        const std::vector<long>& row = tokens[b];
        if (row.size() != cfg.seq_len)
            throw DomainError("forward: batch row " + std::to_string(b) + " has " +
                              std::to_string(row.size()) + " tokens, expected " +
                              std::to_string(cfg.seq_len));
        BlockState st;
        st.x = Matrix(cfg.seq_len, cfg.dim);
        for (std::size_t i = 0; i < cfg.seq_len; ++i) {
            const long id = row[i];
            if (id < 0 || static_cast<std::size_t>(id) >= cfg.vocab)
                throw DomainError("forward: token id " + std::to_string(id) + " at position " +
                                  std::to_string(i) + " outside [0, " + std::to_string(cfg.vocab) +
                                  ")");
            for (std::size_t j = 0; j < cfg.dim; ++j)
                st.x(i, j) = weights.tok_emb(static_cast<std::size_t>(id), j) +
                             weights.pos_emb(i, j);
        }
        st.y = Matrix(cfg.seq_len, cfg.dim);
        st.t = cfg.t0;
        for (std::size_t l = 0; l < cfg.layers; ++l) st = layer_forward(st, l, weights, cfg);
        logits.push_back(mul_nt(layer_norm(st.x, weights.ln_f_gain), weights.w_lm));
    }
    return logits;
}

// ------------------------------ container I/O -------------------------------

namespace {

constexpr const char* kMagic = "sympdyn-weights v1";

std::string join(const std::vector<double>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ' ';
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v[i]);
        os << buf;
    }
    return os.str();
}

std::vector<double> split_doubles(const std::string& s, std::size_t line) {
    std::istringstream is(s);
    std::vector<double> out;
    double v;
    while (is >> v) out.push_back(v);
    if (!is.eof()) throw ParseError(line, "malformed numeric list '" + s + "'");
    return out;
}

void write_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::istream& is) {
    std::uint32_t v = 0;
    if (!is.read(reinterpret_cast<char*>(&v), sizeof v))
        throw ParseError("weight container truncated");
    return v;
}

void write_tensor(std::ostream& os, const std::string& name,
                  const std::vector<std::uint32_t>& dims, const double* data, std::size_t n) {
    write_u32(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u32(os, static_cast<std::uint32_t>(dims.size()));
    for (std::uint32_t d : dims) write_u32(os, d);
    os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
}

struct RawTensor {
    std::vector<std::uint32_t> dims;
    std::vector<double> data;
};

std::pair<std::string, RawTensor> read_tensor(std::istream& is) {
    const std::uint32_t name_len = read_u32(is);
    if (name_len > 4096) throw ParseError("weight container: implausible tensor name length");
    std::string name(name_len, '\0');
    if (!is.read(name.data(), name_len)) throw ParseError("weight container truncated");
    RawTensor t;
    const std::uint32_t rank = read_u32(is);
    if (rank > 8) throw ParseError("weight container: implausible tensor rank");
    std::size_t total = 1;
    for (std::uint32_t r = 0; r < rank; ++r) {
        t.dims.push_back(read_u32(is));
        total *= t.dims.back();
    }
    t.data.resize(total);
    if (!is.read(reinterpret_cast<char*>(t.data.data()),
                 static_cast<std::streamsize>(total * sizeof(double))))
        throw ParseError("weight container truncated in tensor '" + name + "'");
    return {std::move(name), std::move(t)};
}

Matrix to_matrix(const RawTensor& t, const std::string& name) {
    if (t.dims.size() != 2)
        throw ParseError("weight container: tensor '" + name + "' must have rank 2");
    Matrix m(t.dims[0], t.dims[1]);
    std::memcpy(m.data(), t.data.data(), t.data.size() * sizeof(double));
    return m;
}

std::vector<double> to_vector(const RawTensor& t, const std::string& name) {
    if (t.dims.size() != 1)
        throw ParseError("weight container: tensor '" + name + "' must have rank 1");
    return t.data;
}

} // namespace

void save_weights(const std::string& path, const SympFormerConfig& cfg, const ModelWeights& w) {
    cfg.validate();
    w.validate_shapes(cfg);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("save_weights: cannot open '" + path + "'");

    os << kMagic << "\n";
    os << "layers = " << cfg.layers << "\n";
    os << "n_heads = " << cfg.n_heads << "\n";
    os << "dim = " << cfg.dim << "\n";
    os << "seq_len = " << cfg.seq_len << "\n";
    os << "vocab = " << cfg.vocab << "\n";
    os << "method = " << method_name(cfg.method) << "\n";
    os << "attention = " << attention_name(cfg.attention) << "\n";
    os << "causal = " << (cfg.causal ? "true" : "false") << "\n";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", cfg.t0);
    os << "t0 = " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", cfg.c_log);
    os << "c_log = " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", cfg.c_lin);
    os << "c_lin = " << buf << "\n";
    os << "h_x = " << join(cfg.h_x) << "\n";
    os << "h_y = " << join(cfg.h_y) << "\n";
    os << "m_mlp = " << join(cfg.m_mlp) << "\n";
    os << "beta_mlp = " << join(cfg.beta_mlp) << "\n";
    os << "gamma_mlp = " << join(cfg.gamma_mlp) << "\n";
    os << "alpha_plain = " << join(cfg.alpha_plain) << "\n";

    const std::size_t tensor_count = 4 + cfg.layers * (3 * cfg.n_heads + 5);
    os << "%%tensors " << tensor_count << "\n";

    auto mat_dims = [](const Matrix& m) {
        return std::vector<std::uint32_t>{static_cast<std::uint32_t>(m.rows()),
                                          static_cast<std::uint32_t>(m.cols())};
    };
    write_tensor(os, "tok_emb", mat_dims(w.tok_emb), w.tok_emb.data(), w.tok_emb.size());
    write_tensor(os, "pos_emb", mat_dims(w.pos_emb), w.pos_emb.data(), w.pos_emb.size());
    write_tensor(os, "ln_f", {static_cast<std::uint32_t>(w.ln_f_gain.size())}, w.ln_f_gain.data(),
                 w.ln_f_gain.size());
    write_tensor(os, "w_lm", mat_dims(w.w_lm), w.w_lm.data(), w.w_lm.size());
    for (std::size_t l = 0; l < cfg.layers; ++l) {
        const LayerWeights& lw = w.layers[l];
        const std::string p = "layer" + std::to_string(l) + ".";
        for (std::size_t h = 0; h < cfg.n_heads; ++h) {
            const std::string hs = std::to_string(h);
            write_tensor(os, p + "q" + hs, mat_dims(lw.q[h]), lw.q[h].data(), lw.q[h].size());
            write_tensor(os, p + "k" + hs, mat_dims(lw.k[h]), lw.k[h].data(), lw.k[h].size());
            write_tensor(os, p + "v" + hs, mat_dims(lw.v[h]), lw.v[h].data(), lw.v[h].size());
        }
        write_tensor(os, p + "mlp_in", mat_dims(lw.mlp_in), lw.mlp_in.data(), lw.mlp_in.size());
        write_tensor(os, p + "mlp_out", mat_dims(lw.mlp_out), lw.mlp_out.data(),
                     lw.mlp_out.size());
        write_tensor(os, p + "ln", {static_cast<std::uint32_t>(lw.ln_gain.size())},
                     lw.ln_gain.data(), lw.ln_gain.size());
        write_tensor(os, p + "ln_y", {static_cast<std::uint32_t>(lw.ln_y_gain.size())},
                     lw.ln_y_gain.data(), lw.ln_y_gain.size());
        write_tensor(os, p + "ln_v", {static_cast<std::uint32_t>(lw.ln_v_gain.size())},
                     lw.ln_v_gain.data(), lw.ln_v_gain.size());
    }
    if (!os) throw Error("save_weights: write failure on '" + path + "'");
}

std::pair<SympFormerConfig, ModelWeights> load_weights(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("load_weights: cannot open '" + path + "'");

    std::string line;
    if (!std::getline(is, line) || line != kMagic)
        throw ParseError(1, "expected weight container magic '" + std::string(kMagic) + "'");

    SympFormerConfig cfg;
    std::size_t tensor_count = 0;
    std::size_t line_no = 1;
    bool header_done = false;
    while (!header_done && std::getline(is, line)) {
        ++line_no;
        if (line.rfind("%%tensors", 0) == 0) {
            tensor_count = static_cast<std::size_t>(std::stoul(line.substr(9)));
            header_done = true;
            break;
        }
        const KvEntry kv = parse_kv_line(line, line_no);
        if (kv.key.empty()) continue;
        if (kv.key == "layers") cfg.layers = std::stoul(kv.value);
        else if (kv.key == "n_heads") cfg.n_heads = std::stoul(kv.value);
        else if (kv.key == "dim") cfg.dim = std::stoul(kv.value);
        else if (kv.key == "seq_len") cfg.seq_len = std::stoul(kv.value);
        else if (kv.key == "vocab") cfg.vocab = std::stoul(kv.value);
        else if (kv.key == "method") cfg.method = parse_method(kv.value);
        else if (kv.key == "attention") cfg.attention = parse_attention(kv.value);
        else if (kv.key == "causal") cfg.causal = (kv.value == "true" || kv.value == "1");
        else if (kv.key == "t0") cfg.t0 = std::stod(kv.value);
        else if (kv.key == "c_log") cfg.c_log = std::stod(kv.value);
        else if (kv.key == "c_lin") cfg.c_lin = std::stod(kv.value);
        else if (kv.key == "h_x") cfg.h_x = split_doubles(kv.value, line_no);
        else if (kv.key == "h_y") cfg.h_y = split_doubles(kv.value, line_no);
        else if (kv.key == "m_mlp") cfg.m_mlp = split_doubles(kv.value, line_no);
        else if (kv.key == "beta_mlp") cfg.beta_mlp = split_doubles(kv.value, line_no);
        else if (kv.key == "gamma_mlp") cfg.gamma_mlp = split_doubles(kv.value, line_no);
        else if (kv.key == "alpha_plain") cfg.alpha_plain = split_doubles(kv.value, line_no);
        else throw ParseError(line_no, "unknown weight-header key '" + kv.key + "'");
    }
    if (!header_done) throw ParseError(line_no, "missing %%tensors section");
    cfg.validate();

    ModelWeights w;
    w.layers.resize(cfg.layers);
    for (auto& lw : w.layers) {
        lw.q.resize(cfg.n_heads);
        lw.k.resize(cfg.n_heads);
        lw.v.resize(cfg.n_heads);
    }
    for (std::size_t i = 0; i < tensor_count; ++i) {
        auto [name, raw] = read_tensor(is);
        if (name == "tok_emb") w.tok_emb = to_matrix(raw, name);
        else if (name == "pos_emb") w.pos_emb = to_matrix(raw, name);
        else if (name == "ln_f") w.ln_f_gain = to_vector(raw, name);
        else if (name == "w_lm") w.w_lm = to_matrix(raw, name);
        else if (name.rfind("layer", 0) == 0) {
            const std::size_t dot = name.find('.');
            if (dot == std::string::npos)
                throw ParseError("weight container: malformed tensor name '" + name + "'");
            const std::size_t l = std::stoul(name.substr(5, dot - 5));
            if (l >= cfg.layers)
                throw ParseError("weight container: layer index out of range in '" + name + "'");
            const std::string field = name.substr(dot + 1);
            LayerWeights& lw = w.layers[l];
            if (field.rfind('q', 0) == 0 && field != "q")
                lw.q.at(std::stoul(field.substr(1))) = to_matrix(raw, name);
            else if (field.rfind('k', 0) == 0)
                lw.k.at(std::stoul(field.substr(1))) = to_matrix(raw, name);
            else if (field.rfind('v', 0) == 0)
                lw.v.at(std::stoul(field.substr(1))) = to_matrix(raw, name);
            else if (field == "mlp_in") lw.mlp_in = to_matrix(raw, name);
            else if (field == "mlp_out") lw.mlp_out = to_matrix(raw, name);
            else if (field == "ln") lw.ln_gain = to_vector(raw, name);
            else if (field == "ln_y") lw.ln_y_gain = to_vector(raw, name);
            else if (field == "ln_v") lw.ln_v_gain = to_vector(raw, name);
            else throw ParseError("weight container: unknown tensor '" + name + "'");
        } else {
            throw ParseError("weight container: unknown tensor '" + name + "'");
        }
    }
    w.validate_shapes(cfg);
    return {std::move(cfg), std::move(w)};
}

std::vector<std::vector<long>> load_tokens(const std::string& path, std::size_t seq_len) {
    std::ifstream is(path);
    if (!is) throw Error("load_tokens: cannot open '" + path + "'");
    std::vector<std::vector<long>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::vector<long> row;
        long id;
        while (ls >> id) row.push_back(id);
        if (row.empty()) continue;
        if (row.size() != seq_len)
            throw ParseError(line_no, "token row has " + std::to_string(row.size()) +
                                          " ids, expected " + std::to_string(seq_len));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("token file '" + path + "' holds no rows");
    return rows;
}

} // namespace sympdyn::sympformer
