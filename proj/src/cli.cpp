#include "weightlab/cli.hpp"
#include "weightlab/experiments.hpp"
#include "weightlab/field_io.hpp"
#include "weightlab/serial.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>

namespace weightlab {

using nlohmann::json;

namespace {

json cube_json(const Cube& q, int dim) {
    json j;
    j["level"] = q.level;
    j["index"] = dim == 1 ? json::array({q.index[0]}) : json::array({q.index[0], q.index[1]});
    return j;
}

void emit(const std::string& out_path, const json& j, std::ostream& out) {
    if (out_path.empty()) {
        out << j.dump(2) << "\n";
    } else {
        std::ofstream f(out_path, std::ios::binary);
        f << j.dump(2) << "\n";
    }
}

int cmd_characteristics(const std::string& in, double p, const std::string& variant,
                        index_t offset, const std::string& out_path, std::ostream& out) {
    CharacteristicReport rep;
    int dim = 1;
    if (peek_field_kind(in) == FieldKind::matrix) {
        MatrixField w = read_matrix_field(in);
        w.grid = DyadicGrid(w.grid.dim, w.grid.depth, offset);
        dim = w.grid.dim;
        if (variant == "roudenko") rep = matrix_ap_roudenko(w, p);
        else if (variant == "tv") rep = matrix_a2_tv(w);
        else if (variant == "matrix-a1") rep = matrix_a1(w);
        else throw CLI::ValidationError("--variant", "unknown matrix variant " + variant);
    } else {
        ScalarField w = read_scalar_field(in);
        w.grid = DyadicGrid(w.grid.dim, w.grid.depth, offset);
        dim = w.grid.dim;
        if (variant == "ap") rep = scalar_ap(w, p);
        else if (variant == "a1") rep = scalar_a1(w);
        else throw CLI::ValidationError("--variant", "unknown scalar variant " + variant);
    }
    json j;
    j["variant"] = rep.variant;
    j["p"] = rep.p;
    j["value"] = rep.value;
    j["argmax_cube"] = cube_json(rep.argmax_cube, dim);
    j["clamped"] = rep.clamped;
    emit(out_path, j, out);
    return 0;
}

int cmd_maximal(const std::string& in, const std::string& weight_path, const std::string& variant,
                double r, const std::string& out_path) {
    if (variant == "scalar") {
        write_field(out_path, maximal_scalar(read_scalar_field(in)));
    } else if (variant == "universal") {
        if (weight_path.empty())
            throw CLI::ValidationError("--weight", "universal maximal needs a weight field");
        write_field(out_path, maximal_weighted_universal(read_scalar_field(in),
                                                         read_scalar_field(weight_path)));
    } else if (variant == "christ-goldberg") {
        if (weight_path.empty())
            throw CLI::ValidationError("--weight", "christ-goldberg needs a matrix weight field");
        write_field(out_path,
                    christ_goldberg(read_matrix_field(weight_path), read_vector_field(in), r));
    } else if (variant == "convex") {
        write_field(out_path, convex_maximal(read_body_field(in)));
    } else {
        throw CLI::ValidationError("--variant", "unknown variant " + variant);
    }
    return 0;
}

SparseFamily family_from_flags(const DyadicGrid& g, const std::string& family, std::uint64_t seed,
                               int stride, double threshold, const ScalarField* f) {
    if (family == "nested-halves") return sparse_nested_halves(g);
    if (family == "random") return sparse_random(g, seed, stride);
    if (family == "stopping-time") {
        if (!f) throw CLI::ValidationError("--family", "stopping-time needs the input field");
        return sparse_stopping_time(*f, threshold);
    }
    throw CLI::ValidationError("--family", "unknown family " + family);
}

int cmd_sparse(const std::string& in, const std::string& family, std::uint64_t seed, int stride,
               double threshold, bool convex, const std::string& out_path,
               const std::string& family_out, std::ostream& out) {
    json fam_json;
    if (convex) {
        VectorField f = read_vector_field(in);
        // the stopping-time generator runs on |f|
        ScalarField mag(f.grid);
        for (index_t c = 0; c < f.grid.cell_count(); ++c)
            mag.values[static_cast<std::size_t>(c)] = euclidean_norm(f.at(c), f.d);
        SparseFamily fam = family_from_flags(f.grid, family, seed, stride, threshold, &mag);
        write_field(out_path, convex_sparse(fam, f));
        fam_json["members"] = fam.members.size();
    } else {
        ScalarField f = read_scalar_field(in);
        SparseFamily fam = family_from_flags(f.grid, family, seed, stride, threshold, &f);
        write_field(out_path, sparse_scalar(fam, f));
        fam_json["members"] = fam.members.size();
        if (!family_out.empty()) {
            json members = json::array();
            for (std::size_t i = 0; i < fam.members.size(); ++i) {
                json m;
                m["cube"] = cube_json(fam.members[i], f.grid.dim);
                m["witness_cells"] = fam.witness[i];
                members.push_back(m);
            }
            json fj;
            fj["family"] = family;
            fj["members"] = members;
            fj["sparse"] = is_sparse(fam);
            std::ofstream ff(family_out, std::ios::binary);
            ff << fj.dump(2) << "\n";
        }
    }
    out << "sparse: wrote " << out_path << " (" << fam_json["members"] << " members)\n";
    return 0;
}

int cmd_hilbert(const std::string& in, bool maximal, double eps, double x, bool have_x,
                const std::string& out_path, std::ostream& out) {
    ScalarField f = read_scalar_field(in);
    if (maximal) {
        write_field(out_path, hilbert_maximal(f));
        out << "hilbert: wrote " << out_path << "\n";
        return 0;
    }
    if (have_x) {
        json j;
        j["x"] = x;
        j["eps"] = eps;
        j["value"] = hilbert_truncated_at(f, x, eps);
        // kernel 1/(x-y): size |K| <= C/|x-y| and Lipschitz regularity
        j["kernel"] = {{"size_constant", 1.0}, {"regularity_delta", 1.0}};
        emit(out_path, j, out);
        return 0;
    }
    ScalarField t(f.grid);
    for (index_t c = 0; c < f.grid.cell_count(); ++c)
        t.values[static_cast<std::size_t>(c)] = hilbert_truncated(f, c, eps);
    write_field(out_path, t);
    out << "hilbert: wrote " << out_path << "\n";
    return 0;
}

int cmd_opnorm(const std::string& op, double p, const std::string& weight_path, int trials,
               std::uint64_t seed, int depth, int dim, const std::string& out_path,
               std::ostream& out) {
    DyadicGrid g(dim, depth);
    OpNormEstimate est;
    if (op == "maximal" || op == "universal" || op == "sparse") {
        ScalarField w = weight_path.empty() ? ScalarField(g, 1.0) : read_scalar_field(weight_path);
        if (w.grid != g) g = w.grid;
        if (op == "maximal") {
            est = operator_norm_estimate_scalar(
                [](const ScalarField& h) { return maximal_scalar(h); }, g, p, &w, trials, seed);
        } else if (op == "universal") {
            est = operator_norm_estimate_scalar(
                [&](const ScalarField& h) { return maximal_weighted_universal(h, w); }, g, p, &w,
                trials, seed);
        } else {
            SparseFamily fam = sparse_nested_halves(g);
            est = operator_norm_estimate_scalar(
                [&](const ScalarField& h) { return sparse_scalar(fam, h); }, g, p, &w, trials, seed);
        }
    } else if (op == "convex-maximal") {
        if (weight_path.empty()) {
            est = operator_norm_estimate_convex(
                [](const BodyField& f) { return convex_maximal(f); }, g, 2, p, nullptr, trials, seed);
        } else {
            MatrixField w = read_matrix_field(weight_path);
            est = operator_norm_estimate_convex(
                [](const BodyField& f) { return convex_maximal(f); }, w.grid, w.d, p, &w, trials,
                seed);
        }
    } else {
        throw CLI::ValidationError("--operator", "unknown operator " + op);
    }
    json j;
    j["operator"] = op;
    j["p"] = p;
    j["estimate"] = est.estimate;
    j["trials"] = est.trials;
    j["seed"] = est.seed;
    j["lower_bound"] = true;
    emit(out_path, j, out);
    return 0;
}

} // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    apply_thread_env_cap();
    CLI::App app{"weightlab: dyadic weight classes, maximal and sparse operators, "
                 "convex set-valued averages, and inequality-chain experiments"};
    app.require_subcommand(1);

    // characteristics
    auto* ch = app.add_subcommand("characteristics", "weight-class characteristic of a field");
    std::string ch_in, ch_variant = "ap", ch_out;
    double ch_p = 2.0;
    index_t ch_offset = 0;
    ch->add_option("--in", ch_in, "input field file")->required();
    ch->add_option("--p", ch_p, "exponent p");
    ch->add_option("--variant", ch_variant, "ap|a1|roudenko|tv|matrix-a1");
    ch->add_option("--offset", ch_offset, "grid offset in finest cells");
    ch->add_option("--out", ch_out, "output JSON path (stdout when omitted)");

    // maximal
    auto* mx = app.add_subcommand("maximal", "maximal operator of a field");
    std::string mx_in, mx_weight, mx_variant = "scalar", mx_out;
    double mx_r = 1.0;
    mx->add_option("--in", mx_in, "input field file")->required();
    mx->add_option("--weight", mx_weight, "weight field (universal / christ-goldberg)");
    mx->add_option("--variant", mx_variant, "scalar|universal|christ-goldberg|convex");
    mx->add_option("--r", mx_r, "conjugation exponent for christ-goldberg");
    mx->add_option("--out", mx_out, "output field file")->required();

    // sparse
    auto* sp = app.add_subcommand("sparse", "sparse operator of a field");
    std::string sp_in, sp_family = "nested-halves", sp_out, sp_family_out;
    std::uint64_t sp_seed = 1;
    int sp_stride = 2;
    double sp_threshold = 2.0;
    bool sp_convex = false;
    sp->add_option("--in", sp_in, "input field file")->required();
    sp->add_option("--family", sp_family, "nested-halves|random|stopping-time");
    sp->add_option("--seed", sp_seed, "seed for the random family");
    sp->add_option("--stride", sp_stride, "level stride for the random family");
    sp->add_option("--threshold", sp_threshold, "stopping-time threshold (>= 2)");
    sp->add_flag("--convex", sp_convex, "convex-body sparse operator on a vector field");
    sp->add_option("--out", sp_out, "output field file")->required();
    sp->add_option("--emit-family", sp_family_out, "write the family + witnesses as JSON");

    // hilbert
    auto* hb = app.add_subcommand("hilbert", "truncated singular integral (1D)");
    std::string hb_in, hb_out;
    double hb_eps = 0.5, hb_x = 0.0;
    bool hb_max = false;
    hb->add_option("--in", hb_in, "input field file")->required();
    hb->add_option("--eps", hb_eps, "truncation radius");
    auto* hb_x_opt = hb->add_option("--x", hb_x, "evaluate at this point (extended domain)");
    hb->add_flag("--maximal", hb_max, "maximal truncation T*");
    hb->add_option("--out", hb_out, "output path (field, or JSON with --x)");

    // opnorm
    auto* on = app.add_subcommand("opnorm", "operator norm estimate (lower bound)");
    std::string on_op, on_weight, on_out;
    double on_p = 2.0;
    int on_trials = 20, on_depth = 6, on_dim = 1;
    std::uint64_t on_seed = 1;
    on->add_option("--operator", on_op, "maximal|universal|sparse|convex-maximal")->required();
    on->add_option("--p", on_p, "exponent p");
    on->add_option("--weight", on_weight, "weight field file");
    on->add_option("--trials", on_trials, "random trials");
    on->add_option("--seed", on_seed, "seed");
    on->add_option("--depth", on_depth, "grid depth when no weight file is given");
    on->add_option("--dim", on_dim, "grid dimension when no weight file is given");
    on->add_option("--out", on_out, "output JSON path (stdout when omitted)");

    // run
    auto* rn = app.add_subcommand("run", "run a named experiment");
    std::string rn_experiment, rn_config, rn_weight, rn_family, rn_outdir;
    int rn_depth = -1, rn_dim = -1, rn_d = -1, rn_trials = -1, rn_truncation = -1;
    double rn_p = -1.0;
    std::uint64_t rn_seed = 0;
    bool rn_have_seed = false;
    rn->add_option("--experiment", rn_experiment,
                   "duality|collapse|reverse-factorization|sparse-a2|extrapolation|convex-w2|"
                   "sweep|john|convex-maximal|iteration|hilbert");
    rn->add_option("--config", rn_config, "key=value config file");
    rn->add_option("--depth", rn_depth, "grid depth");
    rn->add_option("--dim", rn_dim, "spatial dimension");
    rn->add_option("--d", rn_d, "vector dimension");
    rn->add_option("--p", rn_p, "exponent p");
    rn->add_option("--trials", rn_trials, "trial count");
    rn->add_option("--seed", rn_seed, "seed")->each([&](const std::string&) { rn_have_seed = true; });
    rn->add_option("--truncation", rn_truncation, "iteration series order");
    rn->add_option("--weight", rn_weight, "weight generator spec");
    rn->add_option("--family", rn_family, "sparse family kind");
    rn->add_option("--out-dir", rn_outdir, "artifact directory");

    std::vector<const char*> argv;
    argv.push_back("weightlab");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (ch->parsed()) return cmd_characteristics(ch_in, ch_p, ch_variant, ch_offset, ch_out, out);
        if (mx->parsed()) return cmd_maximal(mx_in, mx_weight, mx_variant, mx_r, mx_out);
        if (sp->parsed())
            return cmd_sparse(sp_in, sp_family, sp_seed, sp_stride, sp_threshold, sp_convex, sp_out,
                              sp_family_out, out);
        if (hb->parsed())
            return cmd_hilbert(hb_in, hb_max, hb_eps, hb_x, hb_x_opt->count() > 0, hb_out, out);
        if (on->parsed())
            return cmd_opnorm(on_op, on_p, on_weight, on_trials, on_seed, on_depth, on_dim, on_out, out);
        if (rn->parsed()) {
            ExperimentConfig cfg;
            if (!rn_config.empty()) cfg = ExperimentConfig::from_kv_file(rn_config);
            if (!rn_experiment.empty()) cfg.experiment = rn_experiment;
            if (cfg.experiment.empty()) {
                err << "usage error: --experiment (or a config with one) is required\n";
                return 2;
            }
            if (rn_depth >= 0) cfg.depth = rn_depth;
            if (rn_dim >= 0) cfg.dim = rn_dim;
            if (rn_d >= 0) cfg.d = rn_d;
            if (rn_p >= 0.0) cfg.p = rn_p;
            if (rn_trials >= 0) cfg.trials = rn_trials;
            if (rn_truncation >= 0) cfg.truncation = rn_truncation;
            if (rn_have_seed) cfg.seed = rn_seed;
            if (!rn_weight.empty()) cfg.weight = WeightSpec::parse(rn_weight);
            if (!rn_family.empty()) cfg.sparse_family = rn_family;
            if (!rn_outdir.empty()) cfg.out_dir = rn_outdir;
            return run_and_write(cfg, out);
        }
    } catch (const CLI::ValidationError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    err << "usage error: no subcommand\n";
    return 2;
}

} // namespace weightlab
