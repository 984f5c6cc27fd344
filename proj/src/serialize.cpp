#include "lccad/serialize.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

namespace lccad {

namespace {

constexpr char kMagic[8] = {'L', 'C', 'C', 'A', 'D', 'M', 'D', 'L'};

class Writer {
public:
    void bytes(const char* p, std::size_t n) { out_.insert(out_.end(), p, p + n); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& in) : in_(in) {}
    void need(std::size_t n) const {
        if (pos_ + n > in_.size()) throw ModelFormatError("model file truncated");
    }
    bool magic() {
        need(sizeof kMagic);
        const bool ok = std::memcmp(in_.data() + pos_, kMagic, sizeof kMagic) == 0;
        pos_ += sizeof kMagic;
        return ok;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in_[pos_++]) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * i);
        return v;
    }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    double f64() { return std::bit_cast<double>(u64()); }
    bool done() const { return pos_ == in_.size(); }

private:
    const std::vector<std::uint8_t>& in_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize_model(const LccadModel& model) {
    if (!model.fitted()) throw std::logic_error("cannot serialize an unfitted model");
    const auto& mapper = *model.mapper;
    const auto n = model.assignment.size();
    const auto k = model.cluster.num_classes();
    const Index dim = model.cluster.dim();

    Writer w;
    w.bytes(kMagic, sizeof kMagic);
    w.u32(kModelFormatVersion);
    w.u32(static_cast<std::uint32_t>(n));
    w.u32(static_cast<std::uint32_t>(mapper.input_dim()));
    w.u32(static_cast<std::uint32_t>(dim));
    w.u32(static_cast<std::uint32_t>(k));
    w.u32(mapper.kind() == FeatureMapKind::RandomFourier ? 0u : 1u);
    w.u32(model.hp.count_policy == ClassCountPolicy::Uniform ? 0u : 1u);
    w.u32(model.hp.init == InitMethod::KMeans ? 0u : 1u);
    w.u64(mapper.seed());
    w.f64(mapper.sigma());
    w.f64(model.hp.theta);
    w.f64(model.hp.nu);
    w.f64(model.hp.gamma.value_or(std::numeric_limits<double>::quiet_NaN()));
    w.u32(static_cast<std::uint32_t>(model.hp.max_outer_iters));
    w.u32(static_cast<std::uint32_t>(model.hp.lbp_max_iters));
    w.f64(model.hp.lbp_damping);
    for (Index r = 0; r < k; ++r)
        for (Index c = 0; c < dim; ++c) w.f64(model.cluster.centers(r, c));
    for (Index r = 0; r < k; ++r) w.f64(model.cluster.radii_sq[r]);
    for (auto count : model.cluster.counts) w.u32(static_cast<std::uint32_t>(count));
    for (Index r = 0; r < k; ++r)
        for (Index c = 0; c < k; ++c) w.f64(model.weights.trans(r, c));
    for (Index r = 0; r < k; ++r)
        for (Index c = 0; c < dim; ++c) w.f64(model.weights.emis(r, c));
    for (int s : model.assignment.states()) w.i32(s);
    return w.take();
}

LccadModel deserialize_model(const std::vector<std::uint8_t>& bytes) {
    Reader r(bytes);
    if (!r.magic()) throw ModelFormatError("not a model file");
    if (const auto version = r.u32(); version != kModelFormatVersion) {
        throw ModelFormatError("unsupported model format version " + std::to_string(version));
    }
    const auto n = r.u32();
    const auto d = static_cast<Index>(r.u32());
    const auto dim = static_cast<Index>(r.u32());
    const auto k = static_cast<int>(r.u32());
    const auto kind = r.u32();
    const auto policy = r.u32();
    const auto init = r.u32();
    if (kind > 1 || policy > 1 || init > 1 || k < 1 || d < 1 || dim < 1) throw ModelFormatError("corrupt model header");
    // Reject headers whose payload could not fit in the file.
    r.need(8 * (static_cast<std::size_t>(k) * static_cast<std::size_t>(dim)));

    LccadModel model;
    const std::uint64_t seed = r.u64();
    const double sigma = r.f64();
    model.hp.num_classes = k;
    model.hp.seed = seed;
    model.hp.sigma = sigma;
    model.hp.rff_dim = dim;
    model.hp.feature_map = kind == 0 ? FeatureMapKind::RandomFourier : FeatureMapKind::Identity;
    model.hp.count_policy = policy == 0 ? ClassCountPolicy::Uniform : ClassCountPolicy::Lagged;
    model.hp.init = init == 0 ? InitMethod::KMeans : InitMethod::Seeds;
    model.hp.theta = r.f64();
    model.hp.nu = r.f64();
    if (const double gamma = r.f64(); !std::isnan(gamma)) model.hp.gamma = gamma;
    model.hp.max_outer_iters = static_cast<int>(r.u32());
    model.hp.lbp_max_iters = static_cast<int>(r.u32());
    model.hp.lbp_damping = r.f64();

    model.mapper = kind == 0 ? FeatureMapper::random_fourier(d, dim, sigma, seed) : FeatureMapper::identity(d, sigma);
    if (model.mapper->output_dim() != dim) throw ModelFormatError("feature dimension inconsistent with map kind");

    model.cluster.centers.resize(k, dim);
    for (Index row = 0; row < k; ++row)
        for (Index c = 0; c < dim; ++c) model.cluster.centers(row, c) = r.f64();
    model.cluster.radii_sq.resize(k);
    for (Index row = 0; row < k; ++row) model.cluster.radii_sq[row] = r.f64();
    for (int c = 0; c < k; ++c) {
        const auto count = r.u32();
        model.cluster.counts.push_back(count);
        model.cluster.empty.push_back(count == 0);
    }
    model.weights = CrfWeights::zeros(k, dim);
    for (Index row = 0; row < k; ++row)
        for (Index c = 0; c < k; ++c) model.weights.trans(row, c) = r.f64();
    for (Index row = 0; row < k; ++row)
        for (Index c = 0; c < dim; ++c) model.weights.emis(row, c) = r.f64();
    r.need(4 * static_cast<std::size_t>(n));
    std::vector<int> states(n);
    for (auto& s : states) s = r.i32();
    if (!r.done()) throw ModelFormatError("trailing bytes after model payload");
    try {
        model.assignment = LatentAssignment(std::move(states), k);
        model.cluster.check();
    } catch (const std::invalid_argument& e) {
        throw ModelFormatError(std::string("corrupt model payload: ") + e.what());
    }
    return model;
}

void save_model(const LccadModel& model, const std::filesystem::path& path) {
    const auto bytes = serialize_model(model);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

LccadModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_model(bytes);
}

}  // namespace lccad
