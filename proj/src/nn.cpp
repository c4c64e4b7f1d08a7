#include "aegis/nn.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace aegis {

namespace {

void check_finite_weights(const CnnWeights& w) {
    for (double v : w.data) {
        if (!std::isfinite(v)) throw std::range_error("nn: non-finite weight");
    }
}

}  // namespace

CnnWeights init_weights(const CnnArchitecture& arch, RandomStream& stream) {
    CnnWeights w;
    w.data.assign(arch.param_count(), 0.0);
    auto fill = [&](std::size_t off, std::size_t count, double fan_in) {
        const double sigma = std::sqrt(2.0 / fan_in);
        for (std::size_t i = 0; i < count; ++i) {
            w.data[off + i] = gaussian(stream, 0.0, sigma);
        }
    };
    const std::size_t c1w = static_cast<std::size_t>(arch.conv1_filters) *
                            arch.conv1_size * arch.conv1_size;
    const std::size_t c2w = static_cast<std::size_t>(arch.conv2_filters) *
                            arch.conv1_filters * arch.conv2_size * arch.conv2_size;
    fill(arch.conv1_w_off(), c1w, arch.conv1_size * arch.conv1_size);
    fill(arch.conv2_w_off(), c2w,
         static_cast<double>(arch.conv1_filters) * arch.conv2_size * arch.conv2_size);
    fill(arch.fc1_w_off(), static_cast<std::size_t>(arch.fc1_units) * arch.flatten_len(),
         arch.flatten_len());
    fill(arch.fc2_w_off(), static_cast<std::size_t>(arch.outputs) * arch.fc1_units,
         arch.fc1_units);
    return w;
}

void forward_ws(const CnnArchitecture& arch, const CnnWeights& w,
                std::span<const double> input, CnnWorkspace& ws,
                ForwardStats* stats) {
    const int n1 = arch.input_side;
    const int n2 = arch.conv1_size;
    const int n3 = arch.conv2_size;
    const int f1 = arch.conv1_filters;
    const int f2 = arch.conv2_filters;
    const int o1 = arch.conv1_out();
    const int o2 = arch.conv2_out();
    const int flat = arch.flatten_len();
    const int r1 = arch.fc1_units;
    const int r2 = arch.outputs;

    if (static_cast<int>(input.size()) != n1 * n1) {
        throw std::invalid_argument("forward: input shape mismatch");
    }
    if (w.data.size() != arch.param_count()) {
        throw std::invalid_argument("forward: weight shape mismatch");
    }

    ws.z1.assign(static_cast<std::size_t>(f1) * o1 * o1, 0.0);
    ws.a1.assign(ws.z1.size(), 0.0);
    ws.z2.assign(static_cast<std::size_t>(f2) * o2 * o2, 0.0);
    ws.a2.assign(ws.z2.size(), 0.0);
    ws.z3.assign(r1, 0.0);
    ws.a3.assign(r1, 0.0);
    ws.q.assign(r2, 0.0);

    const double* k1 = w.data.data() + arch.conv1_w_off();
    const double* b1 = w.data.data() + arch.conv1_b_off();
    const double* k2 = w.data.data() + arch.conv2_w_off();
    const double* b2 = w.data.data() + arch.conv2_b_off();
    const double* w1 = w.data.data() + arch.fc1_w_off();
    const double* fb1 = w.data.data() + arch.fc1_b_off();
    const double* w2 = w.data.data() + arch.fc2_w_off();
    const double* fb2 = w.data.data() + arch.fc2_b_off();

    // conv1: valid, stride 1
    for (int f = 0; f < f1; ++f) {
        const double* kf = k1 + static_cast<std::size_t>(f) * n2 * n2;
        double* zf = ws.z1.data() + static_cast<std::size_t>(f) * o1 * o1;
        for (int i = 0; i < o1; ++i) {
            for (int j = 0; j < o1; ++j) {
                double acc = b1[f];
                for (int u = 0; u < n2; ++u) {
                    const double* row = input.data() + (i + u) * n1 + j;
                    const double* kr = kf + u * n2;
                    for (int v = 0; v < n2; ++v) acc += kr[v] * row[v];
                }
                zf[i * o1 + j] = acc;
            }
        }
    }
    for (std::size_t i = 0; i < ws.z1.size(); ++i) {
        ws.a1[i] = ws.z1[i] > 0.0 ? ws.z1[i] : 0.0;
    }

    // conv2: valid, stride 1 over f1 input channels
    std::uint64_t conv2_muls = 0;
    for (int g = 0; g < f2; ++g) {
        const double* kg = k2 + static_cast<std::size_t>(g) * f1 * n3 * n3;
        double* zg = ws.z2.data() + static_cast<std::size_t>(g) * o2 * o2;
        for (int p = 0; p < o2; ++p) {
            for (int q = 0; q < o2; ++q) {
                double acc = b2[g];
                for (int f = 0; f < f1; ++f) {
                    const double* af = ws.a1.data() + static_cast<std::size_t>(f) * o1 * o1;
                    const double* kgf = kg + static_cast<std::size_t>(f) * n3 * n3;
                    for (int u = 0; u < n3; ++u) {
                        const double* row = af + (p + u) * o1 + q;
                        const double* kr = kgf + u * n3;
                        for (int v = 0; v < n3; ++v) {
                            acc += kr[v] * row[v];
                            if (stats) ++conv2_muls;
                        }
                    }
                }
                zg[p * o2 + q] = acc;
            }
        }
    }
    if (stats) stats->conv2_multiplies += conv2_muls;
    for (std::size_t i = 0; i < ws.z2.size(); ++i) {
        ws.a2[i] = ws.z2[i] > 0.0 ? ws.z2[i] : 0.0;
    }

    // fc1 + ReLU
    for (int r = 0; r < r1; ++r) {
        const double* row = w1 + static_cast<std::size_t>(r) * flat;
        double acc = fb1[r];
        for (int i = 0; i < flat; ++i) acc += row[i] * ws.a2[i];
        ws.z3[r] = acc;
        ws.a3[r] = acc > 0.0 ? acc : 0.0;
    }

    // fc2, linear head
    for (int o = 0; o < r2; ++o) {
        const double* row = w2 + static_cast<std::size_t>(o) * r1;
        double acc = fb2[o];
        for (int r = 0; r < r1; ++r) acc += row[r] * ws.a3[r];
        ws.q[o] = acc;
    }
}

std::vector<double> forward(const CnnArchitecture& arch, const CnnWeights& w,
                            std::span<const double> input, ForwardStats* stats) {
    CnnWorkspace ws;
    forward_ws(arch, w, input, ws, stats);
    return ws.q;
}

double loss_and_gradients(const CnnArchitecture& arch, const CnnWeights& w,
                          std::span<const TrainSample> batch, CnnWeights& grads,
                          CnnWorkspace& ws) {
    if (batch.empty()) throw std::invalid_argument("loss_and_gradients: empty batch");
    grads.data.assign(arch.param_count(), 0.0);

    const int n1 = arch.input_side;
    const int n2 = arch.conv1_size;
    const int n3 = arch.conv2_size;
    const int f1 = arch.conv1_filters;
    const int f2 = arch.conv2_filters;
    const int o1 = arch.conv1_out();
    const int o2 = arch.conv2_out();
    const int flat = arch.flatten_len();
    const int r1 = arch.fc1_units;

    const double* k2 = w.data.data() + arch.conv2_w_off();
    const double* w1 = w.data.data() + arch.fc1_w_off();
    const double* w2 = w.data.data() + arch.fc2_w_off();

    double* gk1 = grads.data.data() + arch.conv1_w_off();
    double* gb1 = grads.data.data() + arch.conv1_b_off();
    double* gk2 = grads.data.data() + arch.conv2_w_off();
    double* gb2 = grads.data.data() + arch.conv2_b_off();
    double* gw1 = grads.data.data() + arch.fc1_w_off();
    double* gfb1 = grads.data.data() + arch.fc1_b_off();
    double* gw2 = grads.data.data() + arch.fc2_w_off();
    double* gfb2 = grads.data.data() + arch.fc2_b_off();

    double loss = 0.0;
    const double inv_b = 1.0 / static_cast<double>(batch.size());

    for (const TrainSample& sample : batch) {
        if (sample.action < 0 || sample.action >= arch.outputs) {
            throw std::invalid_argument("loss_and_gradients: action out of range");
        }
        if (!std::isfinite(sample.target_q)) {
            throw std::range_error("loss_and_gradients: non-finite target");
        }
        forward_ws(arch, w, sample.input, ws);

        const double err = ws.q[sample.action] - sample.target_q;
        loss += err * err * inv_b;
        // Only the selected output backpropagates.
        const double go = 2.0 * err * inv_b;
        const int sel = sample.action;

        // fc2
        gfb2[sel] += go;
        {
            double* grow = gw2 + static_cast<std::size_t>(sel) * r1;
            const double* wrow = w2 + static_cast<std::size_t>(sel) * r1;
            ws.d_z3.assign(r1, 0.0);
            for (int r = 0; r < r1; ++r) {
                grow[r] += go * ws.a3[r];
                if (ws.z3[r] > 0.0) ws.d_z3[r] = go * wrow[r];
            }
        }

        // fc1: d_flat holds d_a2, masked to d_z2 below
        ws.d_flat.assign(flat, 0.0);
        for (int r = 0; r < r1; ++r) {
            const double dz = ws.d_z3[r];
            if (dz == 0.0) continue;
            gfb1[r] += dz;
            double* grow = gw1 + static_cast<std::size_t>(r) * flat;
            const double* wrow = w1 + static_cast<std::size_t>(r) * flat;
            for (int i = 0; i < flat; ++i) {
                grow[i] += dz * ws.a2[i];
                ws.d_flat[i] += dz * wrow[i];
            }
        }
        for (int i = 0; i < flat; ++i) {
            if (ws.z2[i] <= 0.0) ws.d_flat[i] = 0.0;
        }
        const std::vector<double>& d_z2 = ws.d_flat;

        // conv2: weight/bias grads and d_a1
        ws.d_a1.assign(static_cast<std::size_t>(f1) * o1 * o1, 0.0);
        std::vector<double>& d_a1_full = ws.d_a1;
        for (int g = 0; g < f2; ++g) {
            const double* dzg = d_z2.data() + static_cast<std::size_t>(g) * o2 * o2;
            const double* kg = k2 + static_cast<std::size_t>(g) * f1 * n3 * n3;
            double* gkg = gk2 + static_cast<std::size_t>(g) * f1 * n3 * n3;
            for (int p = 0; p < o2; ++p) {
                for (int q = 0; q < o2; ++q) {
                    const double dz = dzg[p * o2 + q];
                    if (dz == 0.0) continue;
                    gb2[g] += dz;
                    for (int f = 0; f < f1; ++f) {
                        const double* af = ws.a1.data() + static_cast<std::size_t>(f) * o1 * o1;
                        double* daf = d_a1_full.data() + static_cast<std::size_t>(f) * o1 * o1;
                        double* gkgf = gkg + static_cast<std::size_t>(f) * n3 * n3;
                        const double* kgf = kg + static_cast<std::size_t>(f) * n3 * n3;
                        for (int u = 0; u < n3; ++u) {
                            const double* arow = af + (p + u) * o1 + q;
                            double* darow = daf + (p + u) * o1 + q;
                            double* gkr = gkgf + u * n3;
                            const double* kr = kgf + u * n3;
                            for (int v = 0; v < n3; ++v) {
                                gkr[v] += dz * arow[v];
                                darow[v] += dz * kr[v];
                            }
                        }
                    }
                }
            }
        }

        // conv1: ReLU mask then weight/bias grads
        for (std::size_t i = 0; i < d_a1_full.size(); ++i) {
            if (ws.z1[i] <= 0.0) d_a1_full[i] = 0.0;
        }
        for (int f = 0; f < f1; ++f) {
            const double* dzf = d_a1_full.data() + static_cast<std::size_t>(f) * o1 * o1;
            double* gkf = gk1 + static_cast<std::size_t>(f) * n2 * n2;
            for (int i = 0; i < o1; ++i) {
                for (int j = 0; j < o1; ++j) {
                    const double dz = dzf[i * o1 + j];
                    if (dz == 0.0) continue;
                    gb1[f] += dz;
                    for (int u = 0; u < n2; ++u) {
                        const double* row = sample.input.data() + (i + u) * n1 + j;
                        double* gkr = gkf + u * n2;
                        for (int v = 0; v < n2; ++v) gkr[v] += dz * row[v];
                    }
                }
            }
        }
    }
    return loss;
}

void sgd_step(CnnWeights& w, const CnnWeights& grads, double learning_rate) {
    if (w.data.size() != grads.data.size()) {
        throw std::invalid_argument("sgd_step: shape mismatch");
    }
    for (std::size_t i = 0; i < w.data.size(); ++i) {
        w.data[i] -= learning_rate * grads.data[i];
    }
}

namespace {

constexpr char kMagic[4] = {'U', 'A', 'V', 'Q'};
constexpr std::uint16_t kVersion = 1;

void put_u16(std::ofstream& out, std::uint16_t v) {
    const unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                                static_cast<unsigned char>(v >> 8)};
    out.write(reinterpret_cast<const char*>(b), 2);
}

std::uint16_t get_u16(std::ifstream& in) {
    unsigned char b[2];
    in.read(reinterpret_cast<char*>(b), 2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

void put_f64le(std::ofstream& out, double v) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64le(std::ifstream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

}  // namespace

void save_weights(const CnnWeights& w, const CnnArchitecture& arch,
                  const std::string& path) {
    if (w.data.size() != arch.param_count()) {
        throw std::invalid_argument("save_weights: shape mismatch");
    }
    check_finite_weights(w);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("save_weights: cannot open " + path);
    out.write(kMagic, 4);
    put_u16(out, kVersion);
    for (int v : {arch.input_side, arch.conv1_size, arch.conv2_size,
                  arch.conv1_filters, arch.conv2_filters, arch.fc1_units,
                  arch.outputs}) {
        put_u16(out, static_cast<std::uint16_t>(v));
    }
    for (double v : w.data) put_f64le(out, v);
    if (!out) throw std::runtime_error("save_weights: write failed for " + path);
}

CnnWeights load_weights(const std::string& path, CnnArchitecture& arch_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_weights: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw std::invalid_argument("load_weights: bad magic in " + path);
    }
    if (get_u16(in) != kVersion) {
        throw std::invalid_argument("load_weights: unsupported version in " + path);
    }
    CnnArchitecture arch;
    arch.input_side = get_u16(in);
    arch.conv1_size = get_u16(in);
    arch.conv2_size = get_u16(in);
    arch.conv1_filters = get_u16(in);
    arch.conv2_filters = get_u16(in);
    arch.fc1_units = get_u16(in);
    arch.outputs = get_u16(in);
    if (!in) throw std::runtime_error("load_weights: truncated header in " + path);
    if (arch.input_side < arch.conv1_size + arch.conv2_size - 1 ||
        arch.conv1_size < 1 || arch.conv2_size < 1 || arch.conv1_filters < 1 ||
        arch.conv2_filters < 1 || arch.fc1_units < 1 || arch.outputs < 1) {
        throw std::invalid_argument("load_weights: invalid shape header in " + path);
    }
    CnnWeights w;
    w.data.resize(arch.param_count());
    for (double& v : w.data) v = get_f64le(in);
    if (!in) throw std::runtime_error("load_weights: truncated data in " + path);
    // Must be exactly at EOF.
    in.peek();
    if (!in.eof()) throw std::invalid_argument("load_weights: trailing bytes in " + path);
    arch_out = arch;
    return w;
}

}  // namespace aegis
