// Command-line front end: dataset generation, embedding with any variant,
// out-of-sample extension, neighbor-count selection, and SVG scatter plots.

#include <CLI11.hpp>

#include "lle/core.hpp"
#include "lle/dataset.hpp"
#include "lle/error.hpp"
#include "lle/fusion.hpp"
#include "lle/kernels.hpp"
#include "lle/model_select.hpp"
#include "lle/neighbors.hpp"
#include "lle/oos.hpp"
#include "lle/plot.hpp"
#include "lle/robust.hpp"
#include "lle/scalable.hpp"
#include "lle/supervised.hpp"
#include "lle/weighted.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

using lle::Embedding;
using lle::Index;
using lle::Matrix;
using lle::Vector;

struct EmbedOptions {
    std::string method = "lle";
    std::string input;
    std::string output;
    bool header = false;
    bool plot = false;
    int k = 10;
    Index p = 2;
    double eps_scale = 1e-3;
    double alpha = 0.5;
    double beta = 1e-3;
    double gamma = 1.0;
    double delta = 0.1;
    double mu = 0.0;       // 0 = auto (lambda_max (1 + 1e-6))
    double sigma = 0.0;    // 0 = median heuristic
    Index m = 0;           // 0 = n / 10, at least p + 2
    std::uint64_t seed = 0;
    int iters = 2;
    double batch_fraction = 0.1;
    std::string probs_file;
    std::string landmark_strategy = "stride";
};

std::vector<int> full_labels(const lle::LabeledDataset& ds,
                             const std::string& method) {
    std::vector<int> out;
    out.reserve(ds.labels.size());
    for (const auto& l : ds.labels) {
        if (!l)
            throw lle::ContractViolation(method +
                                         " requires a label for every point");
        out.push_back(*l);
    }
    return out;
}

lle::scalable::LandmarkSet pick_landmarks(const EmbedOptions& opt, Index n) {
    Index m = opt.m > 0 ? opt.m : std::max<Index>(opt.p + 2, n / 10);
    m = std::min(m, n);
    const auto strategy = opt.landmark_strategy == "random"
                              ? lle::scalable::LandmarkStrategy::UniformRandom
                              : lle::scalable::LandmarkStrategy::Stride;
    return lle::scalable::select_landmarks(n, m, strategy, opt.seed);
}

Embedding embed_with_weight_rule(
    const Matrix& x, int k, Index p,
    const std::function<Vector(const Vector&, const Matrix&)>& rule) {
    const lle::NeighborGraph g =
        lle::neighbors::knn_graph(lle::neighbors::pairwise_euclidean(x), k);
    lle::ReconstructionWeights w;
    w.rows.resize(g.n());
    for (Index i = 0; i < g.n(); ++i) {
        const auto& nbr = g.neighbors[i];
        Matrix pts(x.rows(), nbr.size());
        for (std::size_t j = 0; j < nbr.size(); ++j) pts.col(j) = x.col(nbr[j]);
        w.rows[i] = rule(x.col(i), pts);
    }
    return lle::core::embed(
        lle::core::embedding_matrix(lle::core::scatter_weights(w, g)), p);
}

/// Methods that read a labeled CSV.
bool needs_labels(const std::string& method) {
    static const std::vector<std::string> labeled = {
        "slle", "eslle", "sllep", "plle", "semi-lle", "glle", "ullelda", "dlle"};
    return std::find(labeled.begin(), labeled.end(), method) != labeled.end();
}

const std::vector<std::string>& method_registry() {
    static const std::vector<std::string> methods = {
        "lle",        "kernel-lle", "slle",          "eslle",
        "sllep",      "plle",       "semi-lle",      "glle",
        "rlle",       "rlle-l2",    "rlle-enet",     "isolle",
        "lle-pca",    "ullelda",    "dlle",          "mlle",
        "iterative-lle", "wlle-deformed", "wlle-prob", "landmark-nystrom",
        "landmark-lll",  "incremental"};
    return methods;
}

Matrix run_method(const EmbedOptions& opt) {
    const bool labeled = needs_labels(opt.method);
    lle::LabeledDataset ds;
    Matrix x;
    if (labeled) {
        ds = lle::dataset::load_labeled_csv(opt.input, opt.header);
        x = ds.data;
    } else {
        x = lle::dataset::load_csv(opt.input, opt.header);
    }
    const Index n = x.cols();
    const int k = opt.k;
    const Index p = opt.p;
    const double eps = opt.eps_scale;
    const auto& m = opt.method;

    if (m == "lle") return lle::core::lle(x, k, p, eps).y;
    if (m == "kernel-lle") {
        const double sigma = opt.sigma > 0.0
                                 ? opt.sigma
                                 : lle::kernels::median_heuristic_sigma(x);
        return lle::kernels::kernel_lle(
                   x, lle::KernelDescriptor::gaussian(sigma), k, p, eps)
            .y;
    }
    if (m == "slle")
        return lle::supervised::slle(x, full_labels(ds, m), opt.alpha, k, p, eps).y;
    if (m == "eslle")
        return lle::supervised::eslle(x, full_labels(ds, m), opt.alpha, k, p, eps).y;
    if (m == "sllep") {
        const Embedding base =
            lle::supervised::slle(x, full_labels(ds, m), opt.alpha, k, p, eps);
        const auto proj = lle::supervised::sllep_fit(x, base.y, opt.beta);
        return lle::supervised::sllep_apply(proj, x);
    }
    if (m == "plle") {
        // Labeled rows are the training set, unlabeled rows the test batch.
        std::vector<int> train_idx, test_idx;
        for (Index i = 0; i < n; ++i)
            (ds.labels[i] ? train_idx : test_idx).push_back(static_cast<int>(i));
        if (test_idx.empty())
            throw lle::ContractViolation(
                "plle: mark test points with an empty label field");
        Matrix xtr(x.rows(), train_idx.size()), xte(x.rows(), test_idx.size());
        std::vector<int> labels;
        for (std::size_t i = 0; i < train_idx.size(); ++i) {
            xtr.col(i) = x.col(train_idx[i]);
            labels.push_back(*ds.labels[train_idx[i]]);
        }
        for (std::size_t i = 0; i < test_idx.size(); ++i)
            xte.col(i) = x.col(test_idx[i]);
        const auto res = lle::supervised::plle(xtr, labels, xte, k, p, opt.alpha, eps);
        Matrix out(n, p);
        for (std::size_t i = 0; i < train_idx.size(); ++i)
            out.row(train_idx[i]) = res.train_y.row(i);
        for (std::size_t i = 0; i < test_idx.size(); ++i)
            out.row(test_idx[i]) = res.test_y.row(i);
        return out;
    }
    if (m == "semi-lle")
        return lle::supervised::supervised_lle(
                   x, ds.labels, lle::supervised::DistanceModifier::semi(opt.alpha),
                   k, p, eps)
            .y;
    if (m == "glle")
        return lle::supervised::glle(x, full_labels(ds, m), opt.alpha, k, p, eps).y;
    if (m == "rlle") return lle::robust::rlle(x, k, p, eps).y;
    if (m == "rlle-l2")
        return embed_with_weight_rule(x, k, p, [&](const Vector& xi, const Matrix& pts) {
                   Matrix gram = (xi.replicate(1, pts.cols()) - pts).transpose() *
                                 (xi.replicate(1, pts.cols()) - pts);
                   return lle::robust::rlle_l2_weights(
                       0.5 * (gram + gram.transpose()), opt.gamma);
               }).y;
    if (m == "rlle-enet")
        return embed_with_weight_rule(x, k, p, [&](const Vector& xi, const Matrix& pts) {
                   return lle::robust::rlle_elastic_net_weights(xi, pts, opt.gamma,
                                                                opt.alpha);
               }).y;
    if (m == "isolle") return lle::fusion::isolle(x, k, p, eps).y;
    if (m == "lle-pca") return lle::fusion::lle_pca(x, k, p, eps).y;
    if (m == "ullelda")
        return lle::fusion::ullelda(x, full_labels(ds, m), k, p, eps).y;
    if (m == "dlle")
        return lle::fusion::dlle(x, full_labels(ds, m), k, p, eps).embedded.y;
    if (m == "mlle") return lle::weighted::mlle(x, k, p, eps).y;
    if (m == "iterative-lle")
        return lle::weighted::iterative_lle(x, k, p, opt.iters, eps).y;
    if (m == "wlle-deformed") {
        const Matrix dist = lle::weighted::deformed_distance(x, k);
        const lle::NeighborGraph g = lle::neighbors::knn_graph(dist, k);
        const auto w = lle::core::reconstruction_weights(x, g, eps);
        return lle::core::embed(
                   lle::core::embedding_matrix(lle::core::scatter_weights(w, g)), p)
            .y;
    }
    if (m == "wlle-prob") {
        Vector probs = Vector::Ones(n);
        if (!opt.probs_file.empty()) {
            const Matrix raw = lle::dataset::load_csv(opt.probs_file, false);
            if (raw.rows() != 1 || raw.cols() != n)
                throw lle::ContractViolation(
                    "wlle-prob: probability file must hold one value per point");
            probs = raw.row(0).transpose();
        }
        return lle::weighted::occurrence_weighted_lle(x, probs, k, p, eps).y;
    }
    if (m == "landmark-nystrom")
        return lle::scalable::nystrom_lle(x, k, p, pick_landmarks(opt, n), opt.mu,
                                          eps)
            .y;
    if (m == "landmark-lll")
        return lle::scalable::lll_embed(x, k, p, pick_landmarks(opt, n), eps).all.y;
    if (m == "incremental") {
        const Index n_batch = std::max<Index>(
            1, static_cast<Index>(opt.batch_fraction * static_cast<double>(n)));
        const Index n_train = n - n_batch;
        if (n_train <= k)
            throw lle::ContractViolation("incremental: batch leaves too few points");
        auto st = lle::scalable::incremental_init(x.leftCols(n_train), k, p, eps);
        st = lle::scalable::incremental_update(st, x.rightCols(n_batch));
        return st.y;
    }
    throw lle::ContractViolation("unknown method '" + m + "'");
}

void write_scores_csv(const std::vector<std::pair<int, double>>& scores,
                      const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw lle::Error("cannot write '" + tmp + "'");
        out << "k,score\n";
        char buf[64];
        for (const auto& [k, s] : scores) {
            std::snprintf(buf, sizeof(buf), "%d,%.17g\n", k, s);
            out << buf;
        }
        if (!out) throw lle::Error("write failed for '" + tmp + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw lle::Error("cannot rename '" + tmp + "'");
}

std::string plot_path_for(const std::string& out) {
    std::filesystem::path p(out);
    p.replace_extension(".svg");
    return p.string();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Locally linear embedding toolkit"};
    app.require_subcommand(1);

    // generate
    std::string gen_shape = "swiss", gen_out = "data.csv", gen_params;
    Index gen_n = 800;
    double gen_noise = 0.0;
    std::uint64_t gen_seed = 0;
    auto* gen = app.add_subcommand("generate", "Generate a synthetic manifold");
    gen->add_option("--shape", gen_shape, "swiss or scurve")
        ->check(CLI::IsMember({"swiss", "scurve"}));
    gen->add_option("--n", gen_n, "number of points")->required();
    gen->add_option("--noise", gen_noise, "Gaussian noise sd");
    gen->add_option("--seed", gen_seed, "random seed");
    gen->add_option("--out", gen_out, "output CSV")->required();
    gen->add_option("--params", gen_params, "also write intrinsic (t,h) CSV");

    // embed
    EmbedOptions eo;
    auto* embed = app.add_subcommand("embed", "Embed a CSV dataset");
    embed->add_option("--method", eo.method, "method name (see `lle info`)")
        ->check(CLI::IsMember(method_registry()));
    embed->add_option("--in", eo.input, "input CSV")->required();
    embed->add_option("--out", eo.output, "output CSV")->required();
    embed->add_flag("--header", eo.header, "input has a header row");
    embed->add_flag("--plot", eo.plot, "also write an SVG scatter");
    embed->add_option("--k", eo.k, "neighbor count");
    embed->add_option("--p", eo.p, "embedding dimension");
    embed->add_option("--eps-scale", eo.eps_scale, "Gram regularization scale");
    embed->add_option("--alpha", eo.alpha, "supervision / elastic-net mix");
    embed->add_option("--beta", eo.beta, "ridge parameter (sllep)");
    embed->add_option("--gamma", eo.gamma, "penalty weight (rlle-l2, rlle-enet)");
    embed->add_option("--delta", eo.delta, "weight adjustment step");
    embed->add_option("--mu", eo.mu, "kernel shift (0 = auto)");
    embed->add_option("--sigma", eo.sigma, "Gaussian bandwidth (0 = median)");
    embed->add_option("--m", eo.m, "landmark count (0 = n/10)");
    embed->add_option("--seed", eo.seed, "random seed");
    embed->add_option("--iters", eo.iters, "outer iterations (iterative-lle)");
    embed->add_option("--batch-fraction", eo.batch_fraction,
                      "held-back fraction for incremental");
    embed->add_option("--probs", eo.probs_file, "occurrence probabilities CSV");
    embed->add_option("--landmark-strategy", eo.landmark_strategy,
                      "stride or random")
        ->check(CLI::IsMember({"stride", "random"}));

    // oos
    std::string oos_method = "reconstruct", oos_train, oos_test, oos_out;
    bool oos_header = false;
    int oos_k = 10;
    Index oos_p = 2;
    double oos_mu = 0.0, oos_gamma = 1.0, oos_eps = 1e-3;
    auto* oos = app.add_subcommand("oos", "Out-of-sample embedding");
    oos->add_option("--method", oos_method, "reconstruct, eigenfunctions, kernel-map")
        ->check(CLI::IsMember({"reconstruct", "eigenfunctions", "kernel-map"}));
    oos->add_option("--train", oos_train, "training CSV")->required();
    oos->add_option("--test", oos_test, "test CSV")->required();
    oos->add_option("--out", oos_out, "output CSV")->required();
    oos->add_flag("--header", oos_header, "inputs have header rows");
    oos->add_option("--k", oos_k, "neighbor count");
    oos->add_option("--p", oos_p, "embedding dimension");
    oos->add_option("--mu", oos_mu, "eigenfunction kernel shift (0 = auto)");
    oos->add_option("--gamma", oos_gamma, "kernel-map bandwidth factor");
    oos->add_option("--eps-scale", oos_eps, "Gram regularization scale");

    // select-k
    std::string sk_in, sk_out = "scores.csv", sk_criterion = "residual";
    bool sk_header = false, sk_hier = false;
    int sk_kmin = 4, sk_kmax = 20;
    Index sk_p = 2;
    auto* sk = app.add_subcommand("select-k", "Choose the neighbor count");
    sk->add_option("--in", sk_in, "input CSV")->required();
    sk->add_option("--out", sk_out, "score table CSV");
    sk->add_flag("--header", sk_header, "input has a header row");
    sk->add_option("--criterion", sk_criterion, "residual, procrustes, pne")
        ->check(CLI::IsMember({"residual", "procrustes", "pne"}));
    sk->add_option("--kmin", sk_kmin, "smallest candidate k");
    sk->add_option("--kmax", sk_kmax, "largest candidate k");
    sk->add_flag("--hierarchical", sk_hier, "score only local error minima");
    sk->add_option("--p", sk_p, "embedding dimension");

    // plot
    std::string plot_in, plot_out;
    bool plot_header = false;
    int plot_color_col = 0;
    auto* plot_cmd = app.add_subcommand("plot", "Scatter plot a 2-D CSV");
    plot_cmd->add_option("--in", plot_in, "points CSV")->required();
    plot_cmd->add_option("--out", plot_out, "output SVG")->required();
    plot_cmd->add_flag("--header", plot_header, "input has a header row");
    plot_cmd->add_option("--color-col", plot_color_col,
                         "column index used for the color ramp");

    // info
    auto* info = app.add_subcommand("info", "List methods and defaults");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (gen->parsed()) {
            const auto [x, params] =
                gen_shape == "swiss"
                    ? lle::dataset::generate_swiss_roll(gen_n, gen_noise, gen_seed)
                    : lle::dataset::generate_s_curve(gen_n, gen_noise, gen_seed);
            lle::dataset::save_csv(x, gen_out);
            if (!gen_params.empty()) lle::dataset::save_csv(params, gen_params);
        } else if (embed->parsed()) {
            const Matrix y = run_method(eo);
            lle::dataset::save_csv(y.transpose(), eo.output);
            if (eo.plot) {
                const Matrix x = needs_labels(eo.method)
                                     ? lle::dataset::load_labeled_csv(eo.input,
                                                                      eo.header)
                                           .data
                                     : lle::dataset::load_csv(eo.input, eo.header);
                const Vector color = x.row(0).transpose();
                lle::plot::render_scatter(y, color, plot_path_for(eo.output));
            }
        } else if (oos->parsed()) {
            const Matrix xtr = lle::dataset::load_csv(oos_train, oos_header);
            const Matrix xte = lle::dataset::load_csv(oos_test, oos_header);
            const auto model = lle::oos::train(xtr, oos_k, oos_p, oos_eps);
            Matrix y;
            if (oos_method == "reconstruct")
                y = lle::oos::oos_reconstruct(model, xte).y;
            else if (oos_method == "eigenfunctions") {
                const double mu =
                    oos_mu > 0.0 ? oos_mu : model.lambda_max * (1.0 + 1e-6);
                y = lle::oos::oos_eigenfunctions(model, xte, mu).y;
            } else {
                y = lle::oos::oos_kernel_mapping(model, xte, oos_gamma).y;
            }
            lle::dataset::save_csv(y.transpose(), oos_out);
        } else if (sk->parsed()) {
            const Matrix x = lle::dataset::load_csv(sk_in, sk_header);
            lle::model_select::KSearchSpec spec;
            spec.k_min = sk_kmin;
            spec.k_max = sk_kmax;
            spec.hierarchical = sk_hier;
            spec.p = sk_p;
            const auto criterion =
                sk_criterion == "residual"
                    ? lle::model_select::KCriterion::ResidualVariance
                    : sk_criterion == "procrustes"
                          ? lle::model_select::KCriterion::Procrustes
                          : lle::model_select::KCriterion::Pne;
            const auto sel = lle::model_select::select_k(x, spec, criterion);
            write_scores_csv(sel.scores, sk_out);
            if (sel.hierarchical_fallback)
                std::cerr << "warning: no local error minima, scored the full scan\n";
            std::cout << sel.k << "\n";
        } else if (plot_cmd->parsed()) {
            const Matrix pts = lle::dataset::load_csv(plot_in, plot_header);
            if (pts.rows() < 2)
                throw lle::ContractViolation("plot: need at least two columns");
            if (plot_color_col < 0 || plot_color_col >= pts.rows())
                throw lle::ContractViolation("plot: color column out of range");
            lle::plot::render_scatter(pts.transpose(),
                                      pts.row(plot_color_col).transpose(),
                                      plot_out);
        } else if (info->parsed()) {
            std::cout << "lle-toolkit " << "0.1.0" << "\n\nembed methods:\n";
            for (const auto& m : method_registry()) std::cout << "  " << m << "\n";
            std::cout << "\ndefaults: k=10 p=2 eps-scale=1e-3 alpha=0.5 "
                         "gamma=1.0 sigma=median mu=auto\n";
            std::cout << "labeled input (final integer 'label' column): slle, "
                         "eslle, sllep, plle, semi-lle, glle, ullelda, dlle\n";
        }
    } catch (const lle::ContractViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
