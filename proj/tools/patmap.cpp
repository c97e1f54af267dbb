// patmap: patent classification mapping and portfolio analysis toolkit.
//
// Subcommands wire the pipeline end to end: build the class-by-cited-patent
// matrix, project it to similarity matrices, cluster and decompose, overlay
// portfolios on a basemap, compare two portfolios, build the local map among
// accumulated runs, and compute comparison statistics. Outputs are
// byte-deterministic for identical inputs.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "patmap/patmap.hpp"

namespace {

using namespace patmap;

std::string two_dp(double v) { return format_fixed(v, 2); }

struct CorpusOptions {
    std::string input;
    std::string scheme_path;
    bool strict = false;
};

struct LoadedCorpus {
    ClassScheme scheme;
    std::vector<PatentRecord> records;
    size_t warnings = 0;
};

LoadedCorpus load_corpus(const CorpusOptions& opt) {
    LoadedCorpus out;
    out.scheme = read_class_scheme(opt.scheme_path);
    std::ifstream in(opt.input, std::ios::binary);
    if (!in) throw Error("cannot open '" + opt.input + "' for reading");
    const ParseMode mode = opt.strict ? ParseMode::strict : ParseMode::lenient;
    auto parsed = parse_corpus(in, mode);
    auto validated = validate_against_scheme(parsed.records, out.scheme, mode);
    out.records = std::move(validated.corpus);
    out.warnings = parsed.warnings.size() + validated.unknown.size() + validated.dropped_records;
    return out;
}

Date parse_date_flag(const std::string& value, const char* flag) {
    auto d = parse_date(value);
    if (!d) throw Error(std::string("invalid ") + flag + " '" + value + "'");
    return *d;
}

RecordFilter build_filter(const std::string& city, const std::string& country,
                          const std::string& assignee, const std::string& date_from,
                          const std::string& date_to) {
    RecordFilter f;
    if (!city.empty()) f.city = city;
    if (!country.empty()) f.country = country;
    if (!assignee.empty()) f.assignee_substring = assignee;
    if (!date_from.empty() || !date_to.empty()) {
        const Date from =
            date_from.empty() ? Date{1, 1, 1} : parse_date_flag(date_from, "--date-from");
        const Date to =
            date_to.empty() ? Date{9999, 12, 31} : parse_date_flag(date_to, "--date-to");
        f.date_range = DateRange{from, to};
    }
    return f;
}

BaseMap load_basemap(const std::string& path, const ClassScheme& scheme) {
    auto base = to_base_map(read_vos_map(path));
    require_aligned(base, scheme);
    return base;
}

DistanceMatrix load_distances(const std::string& cosine_path, const ClassScheme& scheme) {
    auto csv = read_symmetric_csv(cosine_path);
    if (csv.codes != scheme.codes())
        throw Error("'" + cosine_path + "' class codes do not match the scheme");
    return to_distance(csv.matrix);
}

std::vector<double> read_series(const std::string& path) {
    std::vector<double> values;
    for (const auto& line : patmap::detail::read_lines(path)) {
        if (line.empty()) continue;
        auto v = parse_double(line);
        if (!v) throw Error(path + ": expected one number per line, got '" + line + "'");
        values.push_back(*v);
    }
    return values;
}

int run_build_matrix(const CorpusOptions& corpus_opt, const std::string& counting,
                     const std::string& output) {
    auto loaded = load_corpus(corpus_opt);
    const Counting mode = counting == "whole" ? Counting::whole : Counting::fractional;
    auto m = build_two_mode(loaded.records, loaded.scheme, mode);
    write_sparse_dump(m, output);
    std::cout << "build-matrix: classes=" << m.n_rows() << " cited=" << m.n_cols()
              << " nnz=" << m.nnz() << " total=" << format_fixed(m.total())
              << " warnings=" << loaded.warnings << " output=" << output << "\n";
    return 0;
}

int run_similarity(const CorpusOptions& corpus_opt, const std::string& counting,
                   const std::string& kind_name, const std::string& output,
                   const std::string& network, double threshold, double scale) {
    auto loaded = load_corpus(corpus_opt);
    const Counting mode = counting == "whole" ? Counting::whole : Counting::fractional;
    const SimilarityKind kind = similarity_kind_from_string(kind_name);
    auto m = build_two_mode(loaded.records, loaded.scheme, mode);
    auto s = similarity_matrix(m, kind);
    write_symmetric_csv(s, loaded.scheme.codes(), output);
    std::string summary = "similarity: kind=" + kind_name +
                          " classes=" + std::to_string(s.size()) + " output=" + output;
    if (!network.empty()) {
        write_vos_network(s, threshold, scale, network);
        summary += " network=" + network + " scale=" + format_fixed(scale, 0);
    }
    std::cout << summary << " warnings=" << loaded.warnings << "\n";
    return 0;
}

int run_cluster(const std::string& similarity_path, double resolution, uint64_t seed,
                const std::string& output, const std::string& terms_path,
                const std::string& scheme_path, const std::string& stopwords_path) {
    auto csv = read_symmetric_csv(similarity_path);
    auto p = modularity_cluster(csv.matrix, resolution, seed);
    write_pajek_cluster(p.assignment, output);
    std::string summary = "cluster: n=" + std::to_string(csv.matrix.size()) +
                          " k=" + std::to_string(p.k) +
                          " modularity=" + format_fixed(modularity(csv.matrix, p, resolution)) +
                          " output=" + output;
    if (!terms_path.empty()) {
        if (scheme_path.empty()) throw Error("--terms requires --scheme for the class titles");
        auto scheme = read_class_scheme(scheme_path);
        if (scheme.codes() != csv.codes)
            throw Error("scheme codes do not match the similarity matrix");
        const auto stopwords =
            stopwords_path.empty() ? default_stopwords() : read_stopwords(stopwords_path);
        auto table = cluster_terms(p, scheme, stopwords);
        std::string text = "cluster\trank\tword\tfrequency\n";
        for (size_t c = 0; c < table.clusters.size(); ++c)
            for (size_t r = 0; r < table.clusters[c].size(); ++r)
                text += std::to_string(c + 1) + '\t' + std::to_string(r + 1) + '\t' +
                        table.clusters[c][r].first + '\t' +
                        std::to_string(table.clusters[c][r].second) + '\n';
        patmap::detail::write_file(terms_path, text);
        summary += " terms=" + terms_path;
    }
    std::cout << summary << "\n";
    return 0;
}

int run_decompose(const std::string& similarity_path, const std::string& basemap_path,
                  int min_size, int max_depth, double resolution, uint64_t seed,
                  const std::string& out_dir, const std::string& stem) {
    auto csv = read_symmetric_csv(similarity_path);
    DecomposePolicy policy{min_size, max_depth, resolution, seed};
    auto tree = decompose(csv.matrix, policy);

    ClassScheme scheme;
    {
        std::vector<std::pair<std::string, std::string>> entries;
        for (const auto& code : csv.codes) entries.emplace_back(code, "");
        scheme = ClassScheme(std::move(entries));
    }
    BaseMap base;
    const BaseMap* base_ptr = nullptr;
    if (!basemap_path.empty()) {
        base = load_basemap(basemap_path, scheme);
        base_ptr = &base;
    }
    auto files = write_cluster_tree(tree, scheme, base_ptr, out_dir, stem);

    size_t nodes = 0, leaves = 0;
    std::function<void(const ClusterTree&)> walk = [&](const ClusterTree& node) {
        ++nodes;
        if (node.is_leaf()) ++leaves;
        for (const auto& c : node.children) walk(c);
    };
    walk(tree);
    std::cout << "decompose: nodes=" << nodes << " leaves=" << leaves
              << " files=" << files.size() << " dir=" << out_dir << "\n";
    return 0;
}

int run_portfolio(const CorpusOptions& corpus_opt, const RecordFilter& filter,
                  const std::string& name, const std::string& basemap_path,
                  const std::string& cosine_path, const std::string& overlay_path,
                  const std::string& matrix_table, const std::string& rao_table,
                  const std::string& pajek_prefix) {
    auto loaded = load_corpus(corpus_opt);
    auto base = load_basemap(basemap_path, loaded.scheme);
    auto distances = load_distances(cosine_path, loaded.scheme);

    auto selected = filter_corpus(loaded.records, filter);
    auto p = distribution(selected, loaded.scheme, name);
    auto map = overlay(p, base, loaded.scheme);
    write_vos_map(map, overlay_path);

    auto diversity = compute_diversity(name, p.weights, p.n_patents, distances);
    if (!matrix_table.empty()) append_matrix_table(matrix_table, p, loaded.scheme);
    if (!rao_table.empty()) append_rao_table(rao_table, diversity);
    if (!pajek_prefix.empty()) {
        write_pajek_vector(p.weights, pajek_prefix + ".vec");
        std::vector<int> clusters;
        for (const auto& node : base.nodes) clusters.push_back(node.cluster);
        write_pajek_cluster(clusters, pajek_prefix + ".cls");
    }

    std::cout << "portfolio " << table_label(name) << ": n=" << p.n_patents
              << " delta=" << two_dp(diversity.delta) << " d2_3=" << two_dp(diversity.d2_3)
              << " overlay=" << overlay_path << " warnings=" << loaded.warnings << "\n";
    return 0;
}

int run_diff(const CorpusOptions& first_opt, const std::string& second_input,
             const std::string& name1, const std::string& name2,
             const std::string& basemap_path, const std::string& output,
             const std::string& pajek_prefix) {
    auto first = load_corpus(first_opt);
    auto second = load_corpus({second_input, first_opt.scheme_path, first_opt.strict});
    auto base = load_basemap(basemap_path, first.scheme);

    auto p1 = distribution(first.records, first.scheme, name1);
    auto p2 = distribution(second.records, first.scheme, name2);
    auto map = difference_overlay(p1, p2, base, first.scheme);
    write_vos_map(map, output);

    if (!pajek_prefix.empty()) {
        std::vector<double> magnitudes;
        std::vector<int> colors;
        for (const auto& node : map.nodes) {
            magnitudes.push_back(node.weight);
            colors.push_back(node.color == DiffColor::red ? 1
                             : node.color == DiffColor::green ? 2
                                                              : 0);
        }
        write_pajek_vector(magnitudes, pajek_prefix + ".vec");
        write_pajek_cluster(colors, pajek_prefix + ".cls");
    }

    size_t red = 0, green = 0, neutral = 0;
    for (const auto& node : map.nodes) {
        if (node.color == DiffColor::red) ++red;
        else if (node.color == DiffColor::green) ++green;
        else ++neutral;
    }
    std::cout << "diff " << table_label(name1) << " vs " << table_label(name2)
              << ": n1=" << p1.n_patents << " n2=" << p2.n_patents << " red=" << red
              << " green=" << green << " neutral=" << neutral << " output=" << output << "\n";
    return 0;
}

int run_local_map(const std::string& matrix_table, const std::string& network_path,
                  const std::string& coocc_path) {
    auto table = read_matrix_table(matrix_table);
    auto net = portfolio_cosine_network(table);
    for (const auto& w : net.warnings) std::cerr << "warning: " << w << "\n";

    std::vector<PajekEdge> edges;
    for (int i = 0; i < net.cosines.size(); ++i)
        for (int j = i + 1; j < net.cosines.size(); ++j)
            if (net.cosines(i, j) > 0) edges.push_back({i, j, net.cosines(i, j)});
    write_pajek_network(net.names, edges, network_path);
    write_symmetric_csv(net.cooccurrence, net.names, coocc_path);

    std::cout << "local-map: runs=" << net.names.size() << " edges=" << edges.size()
              << " network=" << network_path << " coocc=" << coocc_path << "\n";
    return 0;
}

int run_stats_cramers(const std::string& a_path, const std::string& b_path, bool sections,
                      const std::string& scheme_path, bool machine) {
    auto a = read_pajek_cluster(a_path);
    std::vector<std::string> lhs, rhs;
    for (int v : a) lhs.push_back(std::to_string(v));

    if (sections) {
        if (scheme_path.empty()) throw Error("--sections requires --scheme");
        rhs = section_labels(read_class_scheme(scheme_path));
    } else {
        for (int v : read_pajek_cluster(b_path)) rhs.push_back(std::to_string(v));
    }
    const double v = cramers_v(lhs, rhs);
    std::cout << (machine ? format_fixed(v) : "cramers_v=" + format_fixed(v)) << "\n";
    return 0;
}

int run_stats_correlation(const std::string& which, const std::string& x_path,
                          const std::string& y_path, bool machine) {
    auto x = read_series(x_path);
    auto y = read_series(y_path);
    const double v = which == "pearson" ? pearson(x, y) : spearman(x, y);
    std::cout << (machine ? format_fixed(v) : which + "=" + format_fixed(v)) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"patent classification mapping and portfolio analysis toolkit"};
    app.require_subcommand(1);

    CorpusOptions corpus_opt;
    std::string counting = "fractional";
    std::string kind = "cosine";
    std::string output, network, terms_path;
    std::string similarity_path, basemap_path, cosine_path;
    std::string matrix_table, rao_table, pajek_prefix;
    std::string name, name2, input2;
    std::string city, country, assignee, date_from, date_to;
    std::string out_dir, stem = "map";
    std::string a_path, b_path, x_path, y_path, stopwords_path;
    double threshold = 0.0, scale = 1000.0, resolution = 1.0;
    uint64_t seed = 1;
    int min_size = 10, max_depth = 3;
    bool sections = false, machine = false;

    auto add_corpus_flags = [&](CLI::App* cmd) {
        cmd->add_option("--input", corpus_opt.input, "line-delimited patent records")->required();
        cmd->add_option("--scheme", corpus_opt.scheme_path, "class scheme csv (code,title)")
            ->required();
        cmd->add_flag("--strict", corpus_opt.strict,
                      "fail on malformed lines and unknown class codes");
    };

    auto* build = app.add_subcommand("build-matrix", "build the class x cited-patent matrix");
    add_corpus_flags(build);
    build->add_option("--counting", counting, "whole or fractional")
        ->check(CLI::IsMember({"whole", "fractional"}));
    build->add_option("--output", output, "sparse dump path")->required();

    auto* sim = app.add_subcommand("similarity", "compute a class similarity matrix");
    add_corpus_flags(sim);
    sim->add_option("--counting", counting, "whole or fractional")
        ->check(CLI::IsMember({"whole", "fractional"}));
    sim->add_option("--kind", kind, "jaccard, cosine, or tanimoto")
        ->check(CLI::IsMember({"jaccard", "cosine", "tanimoto"}));
    sim->add_option("--output", output, "symmetric matrix csv path")->required();
    sim->add_option("--network", network, "also write a VOS network file");
    sim->add_option("--threshold", threshold, "minimum scaled strength for network edges");
    sim->add_option("--scale", scale, "export scale for network strengths (default 1000)");

    auto* clu = app.add_subcommand("cluster", "cluster a similarity matrix");
    clu->add_option("--similarity", similarity_path, "symmetric matrix csv")->required();
    clu->add_option("--resolution", resolution, "modularity resolution");
    clu->add_option("--seed", seed, "random seed");
    clu->add_option("--output", output, "Pajek cluster file path")->required();
    clu->add_option("--terms", terms_path, "also write per-cluster title words");
    clu->add_option("--scheme", corpus_opt.scheme_path, "scheme csv (required for --terms)");
    clu->add_option("--stopwords", stopwords_path,
                    "stopword list, one word per line (default: built-in English list)");

    auto* dec = app.add_subcommand("decompose", "hierarchically decompose a similarity matrix");
    dec->add_option("--similarity", similarity_path, "symmetric matrix csv")->required();
    dec->add_option("--basemap", basemap_path, "VOS map file supplying coordinates");
    dec->add_option("--min-size", min_size, "do not split nodes smaller than this");
    dec->add_option("--max-depth", max_depth, "maximum tree depth");
    dec->add_option("--resolution", resolution, "modularity resolution");
    dec->add_option("--seed", seed, "random seed");
    dec->add_option("--out-dir", out_dir, "output directory")->required();
    dec->add_option("--stem", stem, "output file stem");

    auto* port = app.add_subcommand("portfolio", "overlay a patent set and record its diversity");
    add_corpus_flags(port);
    port->add_option("--name", name, "sample name (10 characters honored)")->required();
    port->add_option("--basemap", basemap_path, "VOS basemap file")->required();
    port->add_option("--cosine", cosine_path, "cosine similarity csv for distances")->required();
    port->add_option("--overlay", output, "overlay map output path")->required();
    port->add_option("--matrix-table", matrix_table, "class x runs accumulation table");
    port->add_option("--rao-table", rao_table, "diversity accumulation table");
    port->add_option("--pajek", pajek_prefix, "also write <prefix>.vec and <prefix>.cls");
    port->add_option("--city", city, "keep records with this inventor city");
    port->add_option("--country", country, "keep records with this country");
    port->add_option("--assignee", assignee, "keep records whose assignee contains this");
    port->add_option("--date-from", date_from, "keep records on or after YYYY-MM-DD");
    port->add_option("--date-to", date_to, "keep records on or before YYYY-MM-DD");

    auto* diff = app.add_subcommand("diff", "difference map between two patent sets");
    add_corpus_flags(diff);
    diff->add_option("--input2", input2, "second patent set")->required();
    diff->add_option("--name", name, "first sample name")->required();
    diff->add_option("--name2", name2, "second sample name")->required();
    diff->add_option("--basemap", basemap_path, "VOS basemap file")->required();
    diff->add_option("--output", output, "difference map output path")->required();
    diff->add_option("--pajek", pajek_prefix, "also write <prefix>.vec and <prefix>.cls");

    auto* local = app.add_subcommand("local-map", "cosine network among accumulated runs");
    local->add_option("--matrix-table", matrix_table, "class x runs accumulation table")
        ->required();
    local->add_option("--network", network, "Pajek network output path")->required();
    local->add_option("--coocc", output, "co-occurrence matrix output path")->required();

    auto* stats = app.add_subcommand("stats", "comparison statistics");
    stats->require_subcommand(1);
    auto* cram = stats->add_subcommand("cramers-v", "Cramer's V between two labelings");
    cram->add_option("--a", a_path, "Pajek cluster file")->required();
    auto* b_opt = cram->add_option("--b", b_path, "Pajek cluster file");
    auto* sect_flag =
        cram->add_flag("--sections", sections, "compare against CPC section letters");
    cram->add_option("--scheme", corpus_opt.scheme_path, "scheme csv (for --sections)");
    b_opt->excludes(sect_flag);
    cram->add_flag("--machine", machine, "print the bare coefficient");
    auto* pear = stats->add_subcommand("pearson", "Pearson correlation of two series");
    pear->add_option("--x", x_path, "series file, one value per line")->required();
    pear->add_option("--y", y_path, "series file, one value per line")->required();
    pear->add_flag("--machine", machine, "print the bare coefficient");
    auto* spear = stats->add_subcommand("spearman", "Spearman rank correlation of two series");
    spear->add_option("--x", x_path, "series file, one value per line")->required();
    spear->add_option("--y", y_path, "series file, one value per line")->required();
    spear->add_flag("--machine", machine, "print the bare coefficient");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help() << "\n";
        return 2;
    }

    try {
        if (build->parsed()) return run_build_matrix(corpus_opt, counting, output);
        if (sim->parsed())
            return run_similarity(corpus_opt, counting, kind, output, network, threshold, scale);
        if (clu->parsed())
            return run_cluster(similarity_path, resolution, seed, output, terms_path,
                               corpus_opt.scheme_path, stopwords_path);
        if (dec->parsed())
            return run_decompose(similarity_path, basemap_path, min_size, max_depth, resolution,
                                 seed, out_dir, stem);
        if (port->parsed()) {
            auto filter = build_filter(city, country, assignee, date_from, date_to);
            return run_portfolio(corpus_opt, filter, name, basemap_path, cosine_path, output,
                                 matrix_table, rao_table, pajek_prefix);
        }
        if (diff->parsed())
            return run_diff(corpus_opt, input2, name, name2, basemap_path, output, pajek_prefix);
        if (local->parsed()) return run_local_map(matrix_table, network, output);
        if (stats->parsed()) {
            if (cram->parsed()) {
                if (!sections && b_path.empty()) throw Error("provide --b or --sections");
                return run_stats_cramers(a_path, b_path, sections, corpus_opt.scheme_path,
                                         machine);
            }
            if (pear->parsed()) return run_stats_correlation("pearson", x_path, y_path, machine);
            if (spear->parsed()) return run_stats_correlation("spearman", x_path, y_path, machine);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
