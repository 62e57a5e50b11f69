#include "pmnet/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "pmnet/error.hpp"

namespace pmnet {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    const auto end = s.find_last_not_of(" \t\r");
    return begin == std::string::npos ? std::string() : s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_on(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, sep)) fields.push_back(trim(field));
    if (!line.empty() && line.back() == sep) fields.emplace_back();
    return fields;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

FeatureTable parse_feature_table(const std::string& text, const std::string& origin) {
    std::istringstream stream(text);
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(stream, line)) throw ParseError(origin + ": empty file");
    ++line_no;
    const std::vector<std::string> header = split_on(line, ',');
    if (header.size() < 3 || header.front() != "id" || header.back() != "labels") {
        throw ParseError(origin + " line 1: header must be id,f0..f{F-1},labels");
    }
    FeatureTable table;
    table.feature_dim = header.size() - 2;
    for (std::size_t j = 0; j < table.feature_dim; ++j) {
        if (header[1 + j] != "f" + std::to_string(j)) {
            throw ParseError(origin + " line 1: feature column " + std::to_string(j) +
                             " must be named f" + std::to_string(j));
        }
    }

    std::set<std::string> seen_ids;
    while (std::getline(stream, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> fields = split_on(line, ',');
        if (fields.size() != table.feature_dim + 2) {
            throw ParseError(origin + " line " + std::to_string(line_no) + ": expected " +
                             std::to_string(table.feature_dim + 2) + " fields, got " +
                             std::to_string(fields.size()));
        }
        FeatureRow row;
        row.line = line_no;
        row.id = fields.front();
        if (row.id.empty()) {
            throw ParseError(origin + " line " + std::to_string(line_no) + ": empty sample id");
        }
        if (!seen_ids.insert(row.id).second) {
            throw ParseError(origin + " line " + std::to_string(line_no) + ": duplicate id '" +
                             row.id + "'");
        }
        row.features.resize(table.feature_dim);
        for (std::size_t j = 0; j < table.feature_dim; ++j) {
            const std::string& field = fields[1 + j];
            std::size_t used = 0;
            bool ok = !field.empty();
            double value = 0.0;
            if (ok) {
                try {
                    value = std::stod(field, &used);
                } catch (const std::exception&) {
                    ok = false;
                }
            }
            if (!ok || used != field.size() || !std::isfinite(value)) {
                throw ParseError(origin + " line " + std::to_string(line_no) +
                                 ": non-numeric feature '" + field + "'");
            }
            row.features[j] = value;
        }
        const std::string& label_field = fields.back();
        if (!label_field.empty()) {
            for (const std::string& label : split_on(label_field, ';')) {
                if (label.empty()) {
                    throw ParseError(origin + " line " + std::to_string(line_no) +
                                     ": empty label name");
                }
                row.labels.push_back(label);
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

FeatureTable load_feature_table(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw IoError("cannot open feature table '" + path + "'");
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return parse_feature_table(buffer.str(), path);
}

std::string feature_table_text(const FeatureTable& table) {
    std::ostringstream out;
    out << "id";
    for (std::size_t j = 0; j < table.feature_dim; ++j) out << ",f" << j;
    out << ",labels\n";
    for (const FeatureRow& row : table.rows) {
        out << row.id;
        for (double v : row.features) out << "," << format_double(v);
        out << ",";
        for (std::size_t i = 0; i < row.labels.size(); ++i) {
            if (i) out << ";";
            out << row.labels[i];
        }
        out << "\n";
    }
    return out.str();
}

void save_feature_table(const FeatureTable& table, const std::string& path) {
    std::ofstream file(path, std::ios::trunc);
    if (!file) throw IoError("cannot write feature table '" + path + "'");
    file << feature_table_text(table);
    if (!file) throw IoError("short write to '" + path + "'");
}

std::pair<std::vector<SingleSceneSample>, std::vector<std::string>> to_single_samples(
    const FeatureTable& table) {
    std::set<std::string> names;
    for (const FeatureRow& row : table.rows) {
        if (row.labels.size() != 1) {
            throw ParseError("line " + std::to_string(row.line) +
                             ": single-scene rows need exactly one label");
        }
        names.insert(row.labels.front());
    }
    const std::vector<std::string> class_names(names.begin(), names.end());
    std::vector<SingleSceneSample> samples;
    samples.reserve(table.rows.size());
    for (const FeatureRow& row : table.rows) {
        const auto it = std::lower_bound(class_names.begin(), class_names.end(),
                                         row.labels.front());
        samples.push_back({row.features,
                           static_cast<std::size_t>(it - class_names.begin())});
    }
    return {samples, class_names};
}

std::vector<MultiSceneSample> to_multi_samples(const FeatureTable& table,
                                               const std::vector<std::string>& scene_names,
                                               std::size_t* unlabeled) {
    if (unlabeled) *unlabeled = 0;
    std::vector<MultiSceneSample> samples;
    samples.reserve(table.rows.size());
    for (const FeatureRow& row : table.rows) {
        MultiSceneSample sample;
        sample.features = row.features;
        sample.labels.assign(scene_names.size(), 0);
        for (const std::string& label : row.labels) {
            const auto it = std::lower_bound(scene_names.begin(), scene_names.end(), label);
            if (it == scene_names.end() || *it != label) {
                throw ParseError("line " + std::to_string(row.line) + ": unknown class name '" +
                                 label + "'");
            }
            sample.labels[static_cast<std::size_t>(it - scene_names.begin())] = 1;
        }
        if (unlabeled && row.labels.empty()) ++*unlabeled;
        samples.push_back(std::move(sample));
    }
    return samples;
}

FeatureTable table_from_single(const std::vector<SingleSceneSample>& samples,
                               const std::vector<std::string>& class_names,
                               const std::string& id_prefix) {
    FeatureTable table;
    table.feature_dim = samples.empty() ? 0 : samples.front().features.size();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].scene_index >= class_names.size()) {
            throw ArgumentError("table_from_single: scene index out of range");
        }
        table.rows.push_back({id_prefix + std::to_string(i), samples[i].features,
                              {class_names[samples[i].scene_index]}, 0});
    }
    return table;
}

FeatureTable table_from_multi(const std::vector<MultiSceneSample>& samples,
                              const std::vector<std::string>& scene_names,
                              const std::string& id_prefix) {
    FeatureTable table;
    table.feature_dim = samples.empty() ? 0 : samples.front().features.size();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        FeatureRow row;
        row.id = id_prefix + std::to_string(i);
        row.features = samples[i].features;
        if (samples[i].labels.size() != scene_names.size()) {
            throw ShapeError("table_from_multi: label width mismatch");
        }
        for (std::size_t j = 0; j < scene_names.size(); ++j) {
            if (samples[i].labels[j]) row.labels.push_back(scene_names[j]);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

Combine combine_from_string(const std::string& name) {
    if (name == "sum") return Combine::sum;
    if (name == "average") return Combine::average;
    throw ArgumentError("unknown combine mode '" + name + "'");
}

std::string to_string(Combine combine) {
    return combine == Combine::sum ? "sum" : "average";
}

void SynthConfig::validate() const {
    if (num_scenes == 0 || feature_dim == 0) {
        throw ArgumentError("synth: num_scenes and feature_dim must be positive");
    }
    if (samples_per_scene == 0) throw ArgumentError("synth: samples_per_scene must be positive");
    if (scenes_per_image_min < 1 || scenes_per_image_min > scenes_per_image_max ||
        scenes_per_image_max > num_scenes) {
        throw ArgumentError("synth: need 1 <= scenes_min <= scenes_max <= num_scenes");
    }
    if (noise_sigma < 0.0) throw ArgumentError("synth: noise_sigma must be >= 0");
    if (center_scale <= 0.0) throw ArgumentError("synth: center_scale must be positive");
}

namespace {

std::vector<std::string> make_scene_names(std::size_t count) {
    std::size_t width = 2;
    for (std::size_t v = count > 0 ? count - 1 : 0; v >= 100; v /= 10) ++width;
    std::vector<std::string> names;
    names.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
        std::string digits = std::to_string(s);
        names.push_back("scene_" + std::string(width - std::min(width, digits.size()), '0') +
                        digits);
    }
    return names;
}

void add_noise(std::vector<double>& values, double sigma, Rng& rng) {
    if (sigma == 0.0) return;
    for (double& v : values) v += sigma * rng.normal();
}

}  // namespace

SynthData synth_generate(const SynthConfig& config) {
    config.validate();
    SynthData data;
    data.scene_names = make_scene_names(config.num_scenes);

    // Centers: isotropic Gaussians, redrawn until all pairwise distances
    // clear 6 sigma of the sample noise.
    Rng center_rng = Rng(config.seed).fork(1);
    const double min_distance = 6.0 * config.noise_sigma;
    bool separated = false;
    for (std::size_t attempt = 0; attempt < 200 && !separated; ++attempt) {
        data.centers = Matrix(config.num_scenes, config.feature_dim);
        for (double& v : data.centers.data()) v = config.center_scale * center_rng.normal();
        separated = true;
        for (std::size_t a = 0; a < config.num_scenes && separated; ++a) {
            for (std::size_t b = a + 1; b < config.num_scenes; ++b) {
                double dist2 = 0.0;
                for (std::size_t j = 0; j < config.feature_dim; ++j) {
                    const double d = data.centers(a, j) - data.centers(b, j);
                    dist2 += d * d;
                }
                if (dist2 < min_distance * min_distance) {
                    separated = false;
                    break;
                }
            }
        }
    }
    if (!separated) {
        throw ArgumentError("synth: cannot separate " + std::to_string(config.num_scenes) +
                            " centers by 6*noise_sigma in " + std::to_string(config.feature_dim) +
                            " dimensions; lower noise_sigma or raise center_scale");
    }

    Rng single_rng = Rng(config.seed).fork(2);
    for (std::size_t s = 0; s < config.num_scenes; ++s) {
        for (std::size_t i = 0; i < config.samples_per_scene; ++i) {
            SingleSceneSample sample;
            sample.features = data.centers.row_copy(s);
            add_noise(sample.features, config.noise_sigma, single_rng);
            sample.scene_index = s;
            data.single.push_back(std::move(sample));
        }
    }

    Rng multi_rng = Rng(config.seed).fork(3);
    const std::size_t total_multi = config.num_multiscene + config.num_multiscene_test;
    std::vector<std::size_t> scene_ids(config.num_scenes);
    std::iota(scene_ids.begin(), scene_ids.end(), 0);
    for (std::size_t i = 0; i < total_multi; ++i) {
        const std::size_t span = config.scenes_per_image_max - config.scenes_per_image_min + 1;
        const std::size_t count = config.scenes_per_image_min + multi_rng.index(span);
        multi_rng.shuffle(scene_ids);

        MultiSceneSample sample;
        sample.features.assign(config.feature_dim, 0.0);
        sample.labels.assign(config.num_scenes, 0);
        for (std::size_t c = 0; c < count; ++c) {
            const std::size_t scene = scene_ids[c];
            sample.labels[scene] = 1;
            for (std::size_t j = 0; j < config.feature_dim; ++j) {
                sample.features[j] += data.centers(scene, j);
            }
        }
        if (config.combine == Combine::average) {
            for (double& v : sample.features) v /= static_cast<double>(count);
        }
        add_noise(sample.features, config.noise_sigma, multi_rng);
        (i < config.num_multiscene ? data.multi_train : data.multi_test)
            .push_back(std::move(sample));
    }
    return data;
}

std::vector<std::vector<SingleSceneSample>> split_stratified(
    const std::vector<SingleSceneSample>& samples, const std::vector<double>& fractions,
    std::uint64_t seed) {
    if (fractions.empty()) throw ArgumentError("split: no fractions");
    double total = 0.0;
    for (double f : fractions) {
        if (f < 0.0) throw ArgumentError("split: negative fraction");
        total += f;
    }
    if (std::fabs(total - 1.0) > 1e-9) throw ArgumentError("split: fractions must sum to 1");

    std::size_t num_classes = 0;
    for (const auto& s : samples) num_classes = std::max(num_classes, s.scene_index + 1);
    std::vector<std::vector<std::size_t>> by_class(num_classes);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        by_class[samples[i].scene_index].push_back(i);
    }

    Rng rng = Rng(seed).fork(0x5917);
    std::vector<std::vector<SingleSceneSample>> parts(fractions.size());
    for (std::size_t c = 0; c < num_classes; ++c) {
        auto& group = by_class[c];
        if (group.empty()) continue;
        if (group.size() < fractions.size()) {
            throw ArgumentError("split: class " + std::to_string(c) + " has " +
                                std::to_string(group.size()) + " samples for " +
                                std::to_string(fractions.size()) + " parts");
        }
        rng.shuffle(group);

        const std::size_t n = group.size();
        std::vector<std::size_t> counts(fractions.size());
        std::vector<std::pair<double, std::size_t>> remainders;
        std::size_t assigned = 0;
        for (std::size_t p = 0; p < fractions.size(); ++p) {
            const double exact = fractions[p] * static_cast<double>(n);
            counts[p] = static_cast<std::size_t>(exact);
            assigned += counts[p];
            remainders.push_back({exact - static_cast<double>(counts[p]), p});
        }
        std::stable_sort(remainders.begin(), remainders.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        for (std::size_t r = 0; assigned < n; ++r, ++assigned) {
            ++counts[remainders[r % remainders.size()].second];
        }

        std::size_t cursor = 0;
        for (std::size_t p = 0; p < fractions.size(); ++p) {
            for (std::size_t i = 0; i < counts[p]; ++i) {
                parts[p].push_back(samples[group[cursor++]]);
            }
        }
    }
    return parts;
}

}  // namespace pmnet
