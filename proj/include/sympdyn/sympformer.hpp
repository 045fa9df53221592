#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sympdyn/dynamics.hpp"

namespace sympdyn::sympformer {

enum class Method { PlainEuler, ConformalEuler, ExpEuler };
enum class AttentionKind { Softmax, Linear };

const char* method_name(Method m);
const char* attention_name(AttentionKind k);
Method parse_method(const std::string& s);
AttentionKind parse_attention(const std::string& s);

// ---------------------------------------------------------------------------
// Configuration: fixed (already-learned) scalar parameters of Algorithm 1.
// ---------------------------------------------------------------------------
struct SympFormerConfig {
    std::size_t layers = 2;
    std::size_t n_heads = 2;
    std::size_t dim = 8;
    std::size_t seq_len = 4;
    std::size_t vocab = 16;

    // per layer
    std::vector<double> h_x, h_y;                    // step sizes, > 0
    std::vector<double> m_mlp, beta_mlp;             // in (0, 1)
    std::vector<double> gamma_mlp;                   // > 0
    std::vector<double> alpha_plain;                 // plain-Euler zeta1, in (0, 1)

    double c_log = 1.0, c_lin = 0.1; // damping eta(t) = c_log ln t + c_lin t
    double t0 = 1.0;

    Method method = Method::ConformalEuler;
    AttentionKind attention = AttentionKind::Softmax;
    bool causal = true;

    static SympFormerConfig make(std::size_t layers, std::size_t n_heads, std::size_t dim,
                                 std::size_t seq_len, std::size_t vocab);
    void validate() const;
};

// ---------------------------------------------------------------------------
// Weights.
// ---------------------------------------------------------------------------
struct LayerWeights {
    std::vector<Matrix> q, k; // per head, (dim/n_heads) x dim
    std::vector<Matrix> v;    // per head, dim x dim
    Matrix mlp_in;            // 4*dim x dim
    Matrix mlp_out;           // dim x 4*dim
    std::vector<double> ln_gain, ln_y_gain, ln_v_gain; // dim
};

struct ModelWeights {
    Matrix tok_emb; // vocab x dim
    Matrix pos_emb; // seq_len x dim
    std::vector<double> ln_f_gain; // dim
    Matrix w_lm;    // vocab x dim
    std::vector<LayerWeights> layers;

    static ModelWeights random_init(const SympFormerConfig& cfg, std::uint64_t seed);
    void validate_shapes(const SympFormerConfig& cfg) const;
};

// ---------------------------------------------------------------------------
// Operations.
// ---------------------------------------------------------------------------
struct ZetaCoeffs {
    double zeta1 = 1.0;
    double zeta2 = 1.0;
};

// Scalar prefactors of the first-order discretizations:
//   plain Euler:      (alpha, 1)
//   conformal Euler:  (1 - alpha(t_k) h_y, 1) with alpha(t) = c_log/t + c_lin
//   exponential Euler:(e^{-d_eta}, (1 - e^{-d_eta}) / (d_eta / h_y))
ZetaCoeffs zeta_coeffs(Method method, double c_log, double c_lin, double t_k, double h_y,
                       double learned_alpha);

// Per-head score matrices averaged before exponentiation; optional causal
// prefix restriction. Reduces to the dynamics-module fields for one head,
// causal off.
dynamics::FieldPair attention_oracle(const Matrix& x, const Matrix& y, const LayerWeights& lw,
                                     const SympFormerConfig& cfg);

struct BlockState {
    Matrix x, y;
    double t = 0.0;
};

BlockState layer_forward(const BlockState& state, std::size_t layer, const ModelWeights& weights,
                         const SympFormerConfig& cfg);

// Logits per batch row (seq_len x vocab each).
std::vector<Matrix> forward(const std::vector<std::vector<long>>& tokens,
                            const ModelWeights& weights, const SympFormerConfig& cfg);

// Gain-only LayerNorm (no bias; maps 0 to 0), variance epsilon 1e-5.
Matrix layer_norm(const Matrix& x, const std::vector<double>& gain);

// ---------------------------------------------------------------------------
// Weight container and token file I/O. Layout documented in the README:
// text header of `key = value` scalars terminated by `%%tensors <count>`,
// then named binary tensors (u32 name length, name, u32 rank, u32 dims,
// row-major f64 payload), all little-endian.
// ---------------------------------------------------------------------------
void save_weights(const std::string& path, const SympFormerConfig& cfg, const ModelWeights& w);
std::pair<SympFormerConfig, ModelWeights> load_weights(const std::string& path);

// One batch row per line, whitespace-separated token ids; every row must hold
// exactly cfg.seq_len ids.
std::vector<std::vector<long>> load_tokens(const std::string& path, std::size_t seq_len);

} // namespace sympdyn::sympformer
