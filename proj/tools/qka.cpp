#include "qka/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace qka::cli;
    CLI::App app{"Quaternionic Kähler angles of real subspaces of H^n"};
    app.require_subcommand(1);
    const std::uint64_t seed = default_seed();

    ConstructArgs ca;
    ca.seed = seed;
    auto* construct = app.add_subcommand("construct", "build a catalog subspace and write it as JSON");
    construct->add_option("--family", ca.family,
                          "totally_real | totally_complex | quaternionic | im_h_line | cka_plane_sum | "
                          "complexified_cka | v3 | v4 | sum_type")
        ->required();
    construct->add_option("--angles", ca.angles, "angles in radians (1 or 3 values)")->expected(1, 3);
    construct->add_option("--cos", ca.cos, "cosines (1 or 3 values)")->expected(1, 3);
    construct->add_option("--sign", ca.sign, "branch sign, + or -");
    construct->add_option("--lplus", ca.lplus, "number of + blocks (sum_type)");
    construct->add_option("--lminus", ca.lminus, "number of - blocks (sum_type)");
    construct->add_option("--k", ca.k, "real dimension (totally_real, totally_complex, quaternionic)");
    construct->add_option("--n", ca.n, "quaternionic dimension of the ambient space")->required();
    construct->add_option("--out", ca.out, "output file");
    construct->add_option("--seed", ca.seed, "sampling seed");

    AnglesArgs aa;
    aa.seed = seed;
    auto* angles = app.add_subcommand("angles", "sample the angle triple of a subspace file");
    angles->add_option("path", aa.path)->required();
    angles->add_option("--samples", aa.samples);
    angles->add_option("--seed", aa.seed);

    ClassifyArgs cl;
    cl.seed = seed;
    auto* classify = app.add_subcommand("classify", "full classification record of a subspace file");
    classify->add_option("path", cl.path)->required();
    classify->add_option("--seed", cl.seed);

    ModuliArgs ma;
    auto* moduli = app.add_subcommand("moduli", "strata of the moduli space M_{k,n}");
    moduli->add_option("--k", ma.k)->required();
    moduli->add_option("--n", ma.n)->required();
    moduli->add_option("--triple,--angles", ma.angles, "angles in radians; membership only")->expected(3);
    moduli->add_option("--cos", ma.cos, "cosines; membership only")->expected(3);

    SelftestArgs sa;
    sa.seed = seed;
    auto* selftest = app.add_subcommand("selftest", "run the acceptance battery");
    auto* quick = selftest->add_flag("--quick", "reduced grids (default)");
    selftest->add_flag("--full", sa.full, "full grids")->excludes(quick);
    selftest->add_option("--seed", sa.seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : user_error;
    }

    if (*construct) return cmd_construct(ca, std::cout, std::cerr);
    if (*angles) return cmd_angles(aa, std::cout, std::cerr);
    if (*classify) return cmd_classify(cl, std::cout, std::cerr);
    if (*moduli) return cmd_moduli(ma, std::cout, std::cerr);
    if (*selftest) return cmd_selftest(sa, std::cout, std::cerr);
    return user_error;
}
