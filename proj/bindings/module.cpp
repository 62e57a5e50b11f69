#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pmnet/cli.hpp"
#include "pmnet/data.hpp"
#include "pmnet/gradcheck.hpp"
#include "pmnet/matrix.hpp"
#include "pmnet/metrics.hpp"
#include "pmnet/trainer.hpp"

namespace py = pybind11;
using namespace pmnet;

namespace {

Matrix matrix_from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) m.set_row(i, rows[i]);
    return m;
}

std::vector<std::vector<double>> matrix_to_rows(const Matrix& m) {
    std::vector<std::vector<double>> rows;
    rows.reserve(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(m.row_copy(i));
    return rows;
}

}  // namespace

PYBIND11_MODULE(_pmnet, m) {
    m.doc() = "prototype-based memory network over feature vectors";

    py::register_exception<Error>(m, "PmnetError", PyExc_RuntimeError);

    py::class_<Matrix>(m, "Matrix")
        .def(py::init(&matrix_from_rows), py::arg("rows"))
        .def_property_readonly("rows", &Matrix::rows)
        .def_property_readonly("cols", &Matrix::cols)
        .def("tolist", &matrix_to_rows);

    m.def("matmul", &matmul, py::arg("a"), py::arg("b"));
    m.def("softmax_row", &softmax_row, py::arg("logits"));
    m.def("sigmoid", py::overload_cast<const std::vector<double>&>(&sigmoid), py::arg("values"));

    m.def("f_beta", &f_beta, py::arg("precision"), py::arg("recall"), py::arg("beta"));
    py::class_<ExamplePR>(m, "ExamplePR")
        .def_readonly("precision", &ExamplePR::precision)
        .def_readonly("recall", &ExamplePR::recall);
    m.def("example_prf", &example_prf, py::arg("pred"), py::arg("truth"));

    m.def("compute_prototype", &compute_prototype, py::arg("embeddings"));
    py::class_<ClusterResult>(m, "ClusterResult")
        .def_property_readonly("centers", [](const ClusterResult& r) { return matrix_to_rows(r.centers); })
        .def_readonly("assignments", &ClusterResult::assignments)
        .def_readonly("sse_history", &ClusterResult::sse_history);
    m.def(
        "kmeans",
        [](const std::vector<std::vector<double>>& points, std::size_t k, std::uint64_t seed,
           std::size_t max_iter, double tol) {
            return kmeans(matrix_from_rows(points), k, seed, max_iter, tol);
        },
        py::arg("points"), py::arg("k"), py::arg("seed") = 0, py::arg("max_iter") = 100,
        py::arg("tol") = 1e-10);
    m.def(
        "agglomerative",
        [](const std::vector<std::vector<double>>& points, std::size_t k) {
            return agglomerative(matrix_from_rows(points), k);
        },
        py::arg("points"), py::arg("k"));

    py::class_<SingleSceneSample>(m, "SingleSceneSample")
        .def(py::init([](std::vector<double> features, std::size_t scene_index) {
                 return SingleSceneSample{std::move(features), scene_index};
             }),
             py::arg("features"), py::arg("scene_index"))
        .def_readwrite("features", &SingleSceneSample::features)
        .def_readwrite("scene_index", &SingleSceneSample::scene_index);

    py::class_<MultiSceneSample>(m, "MultiSceneSample")
        .def(py::init([](std::vector<double> features, std::vector<int> labels) {
                 return MultiSceneSample{std::move(features), std::move(labels)};
             }),
             py::arg("features"), py::arg("labels"))
        .def_readwrite("features", &MultiSceneSample::features)
        .def_readwrite("labels", &MultiSceneSample::labels);

    py::enum_<Combine>(m, "Combine").value("sum", Combine::sum).value("average", Combine::average);

    py::class_<SynthConfig>(m, "SynthConfig")
        .def(py::init<>())
        .def_readwrite("num_scenes", &SynthConfig::num_scenes)
        .def_readwrite("feature_dim", &SynthConfig::feature_dim)
        .def_readwrite("samples_per_scene", &SynthConfig::samples_per_scene)
        .def_readwrite("num_multiscene", &SynthConfig::num_multiscene)
        .def_readwrite("num_multiscene_test", &SynthConfig::num_multiscene_test)
        .def_readwrite("scenes_per_image_min", &SynthConfig::scenes_per_image_min)
        .def_readwrite("scenes_per_image_max", &SynthConfig::scenes_per_image_max)
        .def_readwrite("noise_sigma", &SynthConfig::noise_sigma)
        .def_readwrite("center_scale", &SynthConfig::center_scale)
        .def_readwrite("combine", &SynthConfig::combine)
        .def_readwrite("seed", &SynthConfig::seed);

    py::class_<SynthData>(m, "SynthData")
        .def_readonly("scene_names", &SynthData::scene_names)
        .def_property_readonly("centers", [](const SynthData& d) { return matrix_to_rows(d.centers); })
        .def_readonly("single", &SynthData::single)
        .def_readonly("multi_train", &SynthData::multi_train)
        .def_readonly("multi_test", &SynthData::multi_test);
    m.def("synth_generate", &synth_generate, py::arg("config"));

    py::enum_<PrototypeMethod>(m, "PrototypeMethod")
        .value("mean", PrototypeMethod::mean)
        .value("kmeans", PrototypeMethod::kmeans)
        .value("agglomerative", PrototypeMethod::agglomerative);

    py::enum_<RetrievalMode>(m, "RetrievalMode")
        .value("standard", RetrievalMode::standard)
        .value("relevance_as_prediction", RetrievalMode::relevance_as_prediction);

    py::enum_<EmbeddingLoss>(m, "EmbeddingLoss")
        .value("cross_entropy", EmbeddingLoss::cross_entropy)
        .value("triplet", EmbeddingLoss::triplet);

    py::class_<TrainSchedule>(m, "TrainSchedule")
        .def(py::init<>())
        .def_readwrite("learning_rate", &TrainSchedule::learning_rate)
        .def_readwrite("beta1", &TrainSchedule::beta1)
        .def_readwrite("beta2", &TrainSchedule::beta2)
        .def_readwrite("epsilon", &TrainSchedule::epsilon)
        .def_readwrite("batch_size", &TrainSchedule::batch_size)
        .def_readwrite("max_epochs", &TrainSchedule::max_epochs)
        .def_readwrite("plateau_patience", &TrainSchedule::plateau_patience)
        .def_readwrite("decay_factor", &TrainSchedule::decay_factor)
        .def_readwrite("seed", &TrainSchedule::seed);

    py::class_<PipelineConfig>(m, "PipelineConfig")
        .def(py::init<>())
        .def_readwrite("feature_dim", &PipelineConfig::feature_dim)
        .def_readwrite("hidden_dims", &PipelineConfig::hidden_dims)
        .def_readwrite("embed_dim", &PipelineConfig::embed_dim)
        .def_readwrite("key_dim", &PipelineConfig::key_dim)
        .def_readwrite("value_dim", &PipelineConfig::value_dim)
        .def_readwrite("num_heads", &PipelineConfig::num_heads)
        .def_readwrite("prototypes_per_scene", &PipelineConfig::prototypes_per_scene)
        .def_readwrite("prototype_method", &PipelineConfig::prototype_method)
        .def_readwrite("mode", &PipelineConfig::mode)
        .def_readwrite("phase1_loss", &PipelineConfig::phase1_loss)
        .def_readwrite("freeze_embedding", &PipelineConfig::freeze_embedding)
        .def_readwrite("threshold", &PipelineConfig::threshold)
        .def_readwrite("phase1", &PipelineConfig::phase1)
        .def_readwrite("phase2", &PipelineConfig::phase2)
        .def_readwrite("seed", &PipelineConfig::seed);

    py::class_<LabelMergeMap>(m, "LabelMergeMap")
        .def(py::init<>())
        .def_readwrite("pairs", &LabelMergeMap::pairs);

    py::class_<EpochRecord>(m, "EpochRecord")
        .def_readonly("epoch", &EpochRecord::epoch)
        .def_readonly("phase", &EpochRecord::phase)
        .def_readonly("learning_rate", &EpochRecord::learning_rate)
        .def_readonly("train_loss", &EpochRecord::train_loss)
        .def_readonly("val_loss", &EpochRecord::val_loss);

    py::class_<TwoPhaseReport>(m, "TwoPhaseReport")
        .def_readonly("history", &TwoPhaseReport::history)
        .def_readonly("memory_hash", &TwoPhaseReport::memory_hash)
        .def_readonly("memory_unchanged", &TwoPhaseReport::memory_unchanged);

    py::class_<PmNetModel>(m, "PmNetModel")
        .def("predict_probs", &PmNetModel::predict_probs, py::arg("features"))
        .def_property_readonly("scene_names",
                               [](const PmNetModel& model) { return model.memory.scene_names; })
        .def_property_readonly("threshold",
                               [](const PmNetModel& model) { return model.config.threshold; });

    m.def(
        "run_two_phase",
        [](const PipelineConfig& config, const std::vector<SingleSceneSample>& single,
           const std::vector<std::string>& class_names, const LabelMergeMap& merge,
           const std::vector<MultiSceneSample>& multi_train) {
            TwoPhaseReport report;
            PmNetModel model = run_two_phase(config, single, class_names, merge, multi_train,
                                             &report);
            return py::make_tuple(std::move(model), report);
        },
        py::arg("config"), py::arg("single"), py::arg("class_names"),
        py::arg("merge") = LabelMergeMap{}, py::arg("multi_train"));

    m.def("derive_scene_names", &derive_scene_names, py::arg("class_names"), py::arg("merge"));
    m.def("save_checkpoint", &save_checkpoint, py::arg("model"), py::arg("path"));
    m.def("load_checkpoint", &load_checkpoint, py::arg("path"));

    py::class_<LabelStats>(m, "LabelStats")
        .def_readonly("scene", &LabelStats::scene)
        .def_readonly("precision", &LabelStats::precision)
        .def_readonly("recall", &LabelStats::recall)
        .def_readonly("support", &LabelStats::support);

    py::class_<MetricsReport>(m, "MetricsReport")
        .def_readonly("mean_f1", &MetricsReport::mean_f1)
        .def_readonly("mean_f2", &MetricsReport::mean_f2)
        .def_readonly("mean_example_precision", &MetricsReport::mean_example_precision)
        .def_readonly("mean_example_recall", &MetricsReport::mean_example_recall)
        .def_readonly("mean_label_precision", &MetricsReport::mean_label_precision)
        .def_readonly("mean_label_recall", &MetricsReport::mean_label_recall)
        .def_readonly("per_label", &MetricsReport::per_label);

    m.def(
        "evaluate_model",
        [](const PmNetModel& model, const std::vector<MultiSceneSample>& dataset,
           double threshold) {
            return evaluate(model.predictor(), dataset, threshold, model.memory.scene_names);
        },
        py::arg("model"), py::arg("dataset"), py::arg("threshold") = 0.5);

    py::class_<GradCheckConfig>(m, "GradCheckConfig")
        .def(py::init<>())
        .def_readwrite("seed", &GradCheckConfig::seed)
        .def_readwrite("num_seeds", &GradCheckConfig::num_seeds)
        .def_readwrite("tolerance", &GradCheckConfig::tolerance)
        .def_readwrite("epsilon", &GradCheckConfig::epsilon);

    py::class_<GradCheckGroup>(m, "GradCheckGroup")
        .def_readonly("name", &GradCheckGroup::name)
        .def_readonly("max_rel_error", &GradCheckGroup::max_rel_error);

    py::class_<GradCheckReport>(m, "GradCheckReport")
        .def_readonly("groups", &GradCheckReport::groups)
        .def_readonly("worst", &GradCheckReport::worst)
        .def_readonly("worst_group", &GradCheckReport::worst_group)
        .def_readonly("tolerance", &GradCheckReport::tolerance)
        .def("passed", &GradCheckReport::passed);

    m.def("run_gradcheck", &run_gradcheck, py::arg("config") = GradCheckConfig{});
}
