#include <cstring>
#include <fstream>
#include <sstream>

#include "pmnet/data.hpp"
#include "pmnet/error.hpp"

namespace pmnet {

namespace {

constexpr char kMagic[8] = {'P', 'M', 'N', 'E', 'T', 'C', 'K', 'P'};
constexpr std::uint32_t kVersion = 1;

// All integers and doubles are encoded little-endian, independent of host
// byte order, so checkpoints are portable and round trips are bit-exact.

class Writer {
public:
    void u8(std::uint8_t v) { buffer_.push_back(static_cast<char>(v)); }

    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buffer_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }

    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buffer_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }

    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        u64(bits);
    }

    void str(const std::string& s) {
        u64(s.size());
        buffer_.append(s);
    }

    void matrix(const Matrix& m) {
        u64(m.rows());
        u64(m.cols());
        for (double v : m.data()) f64(v);
    }

    const std::string& bytes() const { return buffer_; }

private:
    std::string buffer_;
};

class Reader {
public:
    Reader(const std::string& bytes, const std::string& origin)
        : bytes_(bytes), origin_(origin) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }

    std::uint32_t u32() {
        const char* p = take(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
        return v;
    }

    std::uint64_t u64() {
        const char* p = take(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
        return v;
    }

    double f64() {
        const std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, sizeof(v));
        return v;
    }

    std::string str() {
        const std::uint64_t n = u64();
        if (n > remaining()) fail("string longer than the file");
        return std::string(take(n), n);
    }

    Matrix matrix() {
        const std::uint64_t rows = u64();
        const std::uint64_t cols = u64();
        if (rows * cols * 8 > remaining()) fail("matrix longer than the file");
        Matrix m(rows, cols);
        for (double& v : m.data()) v = f64();
        return m;
    }

    std::size_t position() const { return pos_; }
    std::size_t remaining() const { return bytes_.size() - pos_; }

    [[noreturn]] void fail(const std::string& what) const {
        throw IoError(origin_ + ": " + what);
    }

private:
    const char* take(std::size_t n) {
        if (pos_ + n > bytes_.size()) fail("truncated file");
        const char* p = bytes_.data() + pos_;
        pos_ += n;
        return p;
    }

    const std::string& bytes_;
    std::string origin_;
    std::size_t pos_ = 0;
};

void write_section(Writer& out, const std::string& name, const Writer& payload) {
    out.u32(static_cast<std::uint32_t>(name.size()));
    for (char c : name) out.u8(static_cast<std::uint8_t>(c));
    out.u64(payload.bytes().size());
    for (char c : payload.bytes()) out.u8(static_cast<std::uint8_t>(c));
}

void expect_section(Reader& in, const std::string& name) {
    const std::uint32_t len = in.u32();
    std::string actual;
    for (std::uint32_t i = 0; i < len; ++i) actual.push_back(static_cast<char>(in.u8()));
    if (actual != name) in.fail("expected section '" + name + "', found '" + actual + "'");
}

void write_schedule(Writer& w, const TrainSchedule& s) {
    w.f64(s.learning_rate);
    w.f64(s.beta1);
    w.f64(s.beta2);
    w.f64(s.epsilon);
    w.u64(s.batch_size);
    w.u64(s.max_epochs);
    w.u64(s.plateau_patience);
    w.f64(s.decay_factor);
    w.u64(s.seed);
}

TrainSchedule read_schedule(Reader& r) {
    TrainSchedule s;
    s.learning_rate = r.f64();
    s.beta1 = r.f64();
    s.beta2 = r.f64();
    s.epsilon = r.f64();
    s.batch_size = r.u64();
    s.max_epochs = r.u64();
    s.plateau_patience = r.u64();
    s.decay_factor = r.f64();
    s.seed = r.u64();
    return s;
}

}  // namespace

void save_checkpoint(const PmNetModel& model, const std::string& path) {
    Writer out;
    for (char c : kMagic) out.u8(static_cast<std::uint8_t>(c));
    out.u32(kVersion);

    Writer config;
    config.u64(model.config.feature_dim);
    config.u64(model.config.hidden_dims.size());
    for (std::size_t d : model.config.hidden_dims) config.u64(d);
    config.u64(model.config.embed_dim);
    config.u64(model.config.key_dim);
    config.u64(model.config.value_dim);
    config.u64(model.config.num_heads);
    config.u64(model.config.prototypes_per_scene);
    config.u32(static_cast<std::uint32_t>(model.config.prototype_method));
    config.u32(static_cast<std::uint32_t>(model.config.mode));
    config.u32(static_cast<std::uint32_t>(model.config.phase1_loss));
    config.u8(model.config.freeze_embedding ? 1 : 0);
    config.f64(model.config.threshold);
    write_schedule(config, model.config.phase1);
    write_schedule(config, model.config.phase2);
    config.u64(model.config.seed);
    config.u64(model.class_names.size());
    for (const auto& name : model.class_names) config.str(name);
    write_section(out, "config", config);

    Writer embedding;
    embedding.u64(model.net.layers().size());
    for (const DenseLayer& layer : model.net.layers()) {
        embedding.u32(layer.activation == Activation::rectifier ? 1 : 0);
        embedding.matrix(layer.weights);
        embedding.matrix(layer.bias);
    }
    write_section(out, "embedding", embedding);

    Writer classifier;
    const bool has_head = model.head.weights.size() > 0;
    classifier.u8(has_head ? 1 : 0);
    if (has_head) {
        classifier.matrix(model.head.weights);
        classifier.matrix(model.head.bias);
    }
    write_section(out, "classifier", classifier);

    Writer memory;
    memory.u64(model.memory.scene_names.size());
    for (const auto& name : model.memory.scene_names) memory.str(name);
    memory.u64(model.memory.prototypes_per_scene);
    memory.matrix(model.memory.rows);
    memory.u64(model.memory.row_to_scene.size());
    for (std::size_t s : model.memory.row_to_scene) memory.u64(s);
    write_section(out, "memory", memory);

    Writer retrieval;
    retrieval.u32(static_cast<std::uint32_t>(model.module.mode));
    retrieval.u64(model.module.num_heads());
    for (const RetrievalHead& head : model.module.heads) {
        retrieval.matrix(head.query_weights);
        retrieval.matrix(head.query_bias);
        retrieval.matrix(head.key_weights);
        retrieval.matrix(head.key_bias);
        retrieval.matrix(head.value_weights);
        retrieval.matrix(head.value_bias);
    }
    retrieval.u8(model.module.mode == RetrievalMode::standard ? 1 : 0);
    if (model.module.mode == RetrievalMode::standard) {
        retrieval.matrix(model.module.out_weights);
        retrieval.matrix(model.module.out_bias);
    }
    write_section(out, "retrieval", retrieval);

    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot write checkpoint '" + path + "'");
    file.write(out.bytes().data(), static_cast<std::streamsize>(out.bytes().size()));
    if (!file) throw IoError("short write to '" + path + "'");
}

PmNetModel load_checkpoint(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open checkpoint '" + path + "'");
    std::ostringstream buffer;
    buffer << file.rdbuf();
    const std::string bytes = buffer.str();
    Reader in(bytes, path);

    for (char expected : kMagic) {
        if (static_cast<char>(in.u8()) != expected) in.fail("not a checkpoint file");
    }
    const std::uint32_t version = in.u32();
    if (version != kVersion) {
        in.fail("unsupported checkpoint version " + std::to_string(version));
    }

    PmNetModel model;

    expect_section(in, "config");
    in.u64();  // section length; sections are read in fixed order
    model.config.feature_dim = in.u64();
    model.config.hidden_dims.resize(in.u64());
    for (auto& d : model.config.hidden_dims) d = in.u64();
    model.config.embed_dim = in.u64();
    model.config.key_dim = in.u64();
    model.config.value_dim = in.u64();
    model.config.num_heads = in.u64();
    model.config.prototypes_per_scene = in.u64();
    model.config.prototype_method = static_cast<PrototypeMethod>(in.u32());
    model.config.mode = static_cast<RetrievalMode>(in.u32());
    model.config.phase1_loss = static_cast<EmbeddingLoss>(in.u32());
    model.config.freeze_embedding = in.u8() != 0;
    model.config.threshold = in.f64();
    model.config.phase1 = read_schedule(in);
    model.config.phase2 = read_schedule(in);
    model.config.seed = in.u64();
    model.class_names.resize(in.u64());
    for (auto& name : model.class_names) name = in.str();

    expect_section(in, "embedding");
    in.u64();
    const std::uint64_t num_layers = in.u64();
    for (std::uint64_t i = 0; i < num_layers; ++i) {
        DenseLayer layer;
        layer.activation = in.u32() == 1 ? Activation::rectifier : Activation::none;
        layer.weights = in.matrix();
        layer.bias = in.matrix();
        if (layer.bias.rows() != 1 || layer.bias.cols() != layer.weights.cols()) {
            in.fail("embedding bias shape inconsistent");
        }
        layer.grad_weights = Matrix(layer.weights.rows(), layer.weights.cols());
        layer.grad_bias = Matrix(1, layer.bias.cols());
        model.net.layers().push_back(std::move(layer));
    }
    try {
        model.net.validate();
    } catch (const Error& e) {
        in.fail(e.what());
    }

    expect_section(in, "classifier");
    in.u64();
    if (in.u8() == 1) {
        model.head.weights = in.matrix();
        model.head.bias = in.matrix();
        model.head.grad_weights = Matrix(model.head.weights.rows(), model.head.weights.cols());
        model.head.grad_bias = Matrix(1, model.head.bias.cols());
        if (model.head.embed_dim() != model.net.output_dim()) {
            in.fail("classifier head does not match the embedding dim");
        }
    }

    expect_section(in, "memory");
    in.u64();
    model.memory.scene_names.resize(in.u64());
    for (auto& name : model.memory.scene_names) name = in.str();
    model.memory.prototypes_per_scene = in.u64();
    model.memory.rows = in.matrix();
    model.memory.row_to_scene.resize(in.u64());
    for (auto& s : model.memory.row_to_scene) s = in.u64();
    try {
        model.memory.validate();
    } catch (const Error& e) {
        in.fail(e.what());
    }
    if (model.memory.dim() != model.net.output_dim()) {
        in.fail("memory dim does not match the embedding dim");
    }

    expect_section(in, "retrieval");
    in.u64();
    model.module.mode = static_cast<RetrievalMode>(in.u32());
    const std::uint64_t num_heads = in.u64();
    for (std::uint64_t h = 0; h < num_heads; ++h) {
        RetrievalHead head;
        head.query_weights = in.matrix();
        head.query_bias = in.matrix();
        head.key_weights = in.matrix();
        head.key_bias = in.matrix();
        head.value_weights = in.matrix();
        head.value_bias = in.matrix();
        head.grad_query_weights = Matrix(head.query_weights.rows(), head.query_weights.cols());
        head.grad_query_bias = Matrix(1, head.query_bias.cols());
        head.grad_key_weights = Matrix(head.key_weights.rows(), head.key_weights.cols());
        head.grad_key_bias = Matrix(1, head.key_bias.cols());
        head.grad_value_weights = Matrix(head.value_weights.rows(), head.value_weights.cols());
        head.grad_value_bias = Matrix(1, head.value_bias.cols());
        model.module.heads.push_back(std::move(head));
    }
    if (in.u8() == 1) {
        model.module.out_weights = in.matrix();
        model.module.out_bias = in.matrix();
        model.module.grad_out_weights =
            Matrix(model.module.out_weights.rows(), model.module.out_weights.cols());
        model.module.grad_out_bias = Matrix(1, model.module.out_bias.cols());
        if (model.module.out_bias.cols() != model.memory.scene_count()) {
            in.fail("output layer width does not match the scene count");
        }
    }
    try {
        model.module.validate();
    } catch (const Error& e) {
        in.fail(e.what());
    }
    if (model.module.embed_dim() != model.net.output_dim()) {
        in.fail("retrieval module does not match the embedding dim");
    }
    return model;
}

}  // namespace pmnet
