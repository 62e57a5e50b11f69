#include "pmnet/prototype.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "pmnet/error.hpp"

namespace pmnet {

void PrototypeMemory::validate() const {
    if (prototypes_per_scene == 0) throw StateError("memory: prototypes_per_scene must be >= 1");
    if (row_count() != scene_count() * prototypes_per_scene) {
        throw StateError("memory: row count must equal scenes * prototypes_per_scene");
    }
    if (row_to_scene.size() != row_count()) {
        throw StateError("memory: row_to_scene does not cover all rows");
    }
    std::vector<std::size_t> per_scene(scene_count(), 0);
    for (std::size_t scene : row_to_scene) {
        if (scene >= scene_count()) throw StateError("memory: row mapped to unknown scene");
        ++per_scene[scene];
    }
    for (std::size_t count : per_scene) {
        if (count != prototypes_per_scene) {
            throw StateError("memory: every scene must own exactly k rows");
        }
    }
    if (!rows.all_finite()) throw NumericError("memory: non-finite prototype row");
}

std::vector<std::string> LabelMergeMap::targets_for(const std::string& source) const {
    if (pairs.empty()) return {source};
    std::vector<std::string> targets;
    for (const auto& [from, to] : pairs) {
        if (from == source) targets.push_back(to);
    }
    if (targets.empty()) targets.push_back(source);
    return targets;
}

LabelMergeMap parse_merge_map(const std::string& text) {
    LabelMergeMap map;
    std::istringstream stream(text);
    std::string line;
    std::size_t line_no = 0;
    auto trim = [](std::string s) {
        const auto begin = s.find_first_not_of(" \t\r");
        const auto end = s.find_last_not_of(" \t\r");
        return begin == std::string::npos ? std::string() : s.substr(begin, end - begin + 1);
    };
    while (std::getline(stream, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto arrow = line.find("->");
        if (arrow == std::string::npos) {
            throw ParseError("merge map line " + std::to_string(line_no) +
                             ": expected 'source -> target'");
        }
        const std::string source = trim(line.substr(0, arrow));
        const std::string target = trim(line.substr(arrow + 2));
        if (source.empty() || target.empty()) {
            throw ParseError("merge map line " + std::to_string(line_no) +
                             ": empty source or target");
        }
        map.pairs.emplace_back(source, target);
    }
    return map;
}

LabelMergeMap load_merge_map(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw IoError("cannot open merge map '" + path + "'");
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return parse_merge_map(buffer.str());
}

std::vector<std::string> derive_scene_names(const std::vector<std::string>& class_names,
                                            const LabelMergeMap& merge) {
    std::set<std::string> targets;
    for (const auto& name : class_names) {
        for (const auto& target : merge.targets_for(name)) targets.insert(target);
    }
    return {targets.begin(), targets.end()};
}

std::vector<double> compute_prototype(const std::vector<std::vector<double>>& embeddings) {
    if (embeddings.empty()) throw ArgumentError("compute_prototype: empty embedding list");
    const std::size_t dim = embeddings.front().size();
    std::vector<double> sum(dim, 0.0);
    for (const auto& e : embeddings) {
        if (e.size() != dim) throw ShapeError("compute_prototype: ragged embeddings");
        for (std::size_t j = 0; j < dim; ++j) sum[j] += e[j];
    }
    const double count = static_cast<double>(embeddings.size());
    for (double& v : sum) v /= count;
    return sum;
}

PrototypeMethod prototype_method_from_string(const std::string& name) {
    if (name == "mean") return PrototypeMethod::mean;
    if (name == "kmeans") return PrototypeMethod::kmeans;
    if (name == "agglomerative") return PrototypeMethod::agglomerative;
    throw ArgumentError("unknown prototype method '" + name + "'");
}

std::string to_string(PrototypeMethod method) {
    switch (method) {
        case PrototypeMethod::mean: return "mean";
        case PrototypeMethod::kmeans: return "kmeans";
        case PrototypeMethod::agglomerative: return "agglomerative";
    }
    return "mean";
}

PrototypeMemory build_memory(const EmbeddingNet& net,
                             const std::vector<SingleSceneSample>& samples,
                             const std::vector<std::string>& class_names,
                             const LabelMergeMap& merge, std::size_t k, PrototypeMethod method,
                             std::uint64_t seed) {
    if (samples.empty()) throw ArgumentError("build_memory: empty sample list");
    if (k == 0) throw ArgumentError("build_memory: k must be >= 1");
    if (method == PrototypeMethod::mean && k != 1) {
        throw ArgumentError("build_memory: the mean method requires k = 1");
    }

    PrototypeMemory memory;
    memory.scene_names = derive_scene_names(class_names, merge);
    memory.prototypes_per_scene = k;
    const std::size_t num_scenes = memory.scene_names.size();

    // Embeddings grouped by target scene, preserving sample order.
    std::vector<std::vector<std::vector<double>>> grouped(num_scenes);
    for (const auto& sample : samples) {
        if (sample.scene_index >= class_names.size()) {
            throw ArgumentError("build_memory: sample scene index out of range");
        }
        const std::vector<double> e = embed(net, sample.features);
        for (const auto& target : merge.targets_for(class_names[sample.scene_index])) {
            const auto it =
                std::lower_bound(memory.scene_names.begin(), memory.scene_names.end(), target);
            if (it == memory.scene_names.end() || *it != target) continue;
            grouped[static_cast<std::size_t>(it - memory.scene_names.begin())].push_back(e);
        }
    }

    memory.rows = Matrix(num_scenes * k, net.output_dim());
    memory.row_to_scene.assign(num_scenes * k, 0);
    for (std::size_t s = 0; s < num_scenes; ++s) {
        const auto& group = grouped[s];
        if (group.size() < k) {
            throw ArgumentError("build_memory: scene '" + memory.scene_names[s] + "' has " +
                                std::to_string(group.size()) + " samples but k = " +
                                std::to_string(k));
        }
        Matrix centers;
        if (method == PrototypeMethod::mean) {
            centers = Matrix::row_vector(compute_prototype(group));
        } else {
            Matrix points(group.size(), net.output_dim());
            for (std::size_t i = 0; i < group.size(); ++i) points.set_row(i, group[i]);
            if (method == PrototypeMethod::kmeans) {
                centers = kmeans(points, k, splitmix64(seed ^ (0x9e37 + s))).centers;
            } else {
                centers = agglomerative(points, k).centers;
            }
        }
        for (std::size_t c = 0; c < k; ++c) {
            memory.rows.set_row(s * k + c, centers.row_copy(c));
            memory.row_to_scene[s * k + c] = s;
        }
    }
    memory.validate();
    return memory;
}

}  // namespace pmnet
