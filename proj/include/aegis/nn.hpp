// Fixed-topology convolutional Q-network: valid conv (6x6x20) -> ReLU ->
// valid conv (5x5x40) -> ReLU -> FC 1000 ReLU -> FC 31 linear. Forward,
// exact backpropagation, SGD and binary weight persistence. 64-bit reals
// throughout; no randomness anywhere in the forward pass.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "aegis/numerics.hpp"

namespace aegis {

struct CnnArchitecture {
    int input_side = 12;     // n1
    int conv1_size = 6;      // n2
    int conv2_size = 5;      // n3
    int conv1_filters = 20;  // f1
    int conv2_filters = 40;  // f2
    int fc1_units = 1000;    // r1
    int outputs = 31;        // r2

    int conv1_out() const { return input_side - conv1_size + 1; }  // 7
    int conv2_out() const { return conv1_out() - conv2_size + 1; } // 3
    int flatten_len() const { return conv2_filters * conv2_out() * conv2_out(); }

    // Flat layout offsets: conv1 kernels (filter-major, row-major), conv1
    // biases, conv2 kernels, conv2 biases, fc1 weights (row-major), fc1
    // biases, fc2 weights, fc2 biases.
    std::size_t conv1_w_off() const { return 0; }
    std::size_t conv1_b_off() const {
        return conv1_w_off() + static_cast<std::size_t>(conv1_filters) * conv1_size * conv1_size;
    }
    std::size_t conv2_w_off() const { return conv1_b_off() + conv1_filters; }
    std::size_t conv2_b_off() const {
        return conv2_w_off() +
               static_cast<std::size_t>(conv2_filters) * conv1_filters * conv2_size * conv2_size;
    }
    std::size_t fc1_w_off() const { return conv2_b_off() + conv2_filters; }
    std::size_t fc1_b_off() const {
        return fc1_w_off() + static_cast<std::size_t>(fc1_units) * flatten_len();
    }
    std::size_t fc2_w_off() const { return fc1_b_off() + fc1_units; }
    std::size_t fc2_b_off() const {
        return fc2_w_off() + static_cast<std::size_t>(outputs) * fc1_units;
    }
    std::size_t param_count() const { return fc2_b_off() + outputs; }

    bool operator==(const CnnArchitecture&) const = default;
};

// All parameters in one flat vector (layout per CnnArchitecture offsets).
struct CnnWeights {
    std::vector<double> data;
};

// Scratch activations reused across forward/backward calls.
struct CnnWorkspace {
    std::vector<double> z1, a1, z2, a2, z3, a3, q;
    std::vector<double> d_z3, d_flat, d_a1;  // backward scratch
};

struct ForwardStats {
    std::uint64_t conv2_multiplies = 0;
};

// Fresh weights: each weight ~ N(0, 2/fan_in), biases zero. Draw order is
// the flat layout order, so identical streams give identical weights.
CnnWeights init_weights(const CnnArchitecture& arch, RandomStream& stream);

// Forward pass; input is input_side^2 values row-major. Returns the Q-value
// vector (length arch.outputs). Throws std::invalid_argument on shape
// mismatch. `stats`, when given, counts each conv2 multiply individually.
std::vector<double> forward(const CnnArchitecture& arch, const CnnWeights& w,
                            std::span<const double> input,
                            ForwardStats* stats = nullptr);

// Workspace variant used in training loops; q ends up in ws.q.
void forward_ws(const CnnArchitecture& arch, const CnnWeights& w,
                std::span<const double> input, CnnWorkspace& ws,
                ForwardStats* stats = nullptr);

struct TrainSample {
    std::span<const double> input;
    int action = 0;
    double target_q = 0.0;
};

// Mean over the batch of (q[action] - target)^2, plus exact gradients with
// respect to every parameter (accumulated into `grads`, which is resized
// and zeroed here). Throws std::invalid_argument for an empty batch or an
// out-of-range action, std::range_error for a non-finite target.
double loss_and_gradients(const CnnArchitecture& arch, const CnnWeights& w,
                          std::span<const TrainSample> batch, CnnWeights& grads,
                          CnnWorkspace& ws);

// w <- w - lr * g, elementwise.
void sgd_step(CnnWeights& w, const CnnWeights& grads, double learning_rate);

// Binary persistence: magic "UAVQ", version u16 = 1, seven u16 arch fields
// (n1, n2, n3, f1, f2, r1, r2), then every parameter as a little-endian
// 64-bit IEEE-754 value in flat layout order.
void save_weights(const CnnWeights& w, const CnnArchitecture& arch,
                  const std::string& path);
CnnWeights load_weights(const std::string& path, CnnArchitecture& arch_out);

}  // namespace aegis
