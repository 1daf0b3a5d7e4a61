// Copyright 2026 The c4vqc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "c4vqc/symmetry.hpp"

#include <cmath>
#include <random>
#include <string>

#include "c4vqc/errors.hpp"

namespace c4vqc {

PixelIndex rotate_index(PixelIndex p, int n) {
    if (p.i < 0 || p.i >= n || p.j < 0 || p.j >= n) {
        throw ValidationError("rotate_index: pixel out of range");
    }
    return {n - 1 - p.j, p.i};
}

std::vector<double> rotate_image(const std::vector<double>& x, int n, int times) {
    if (static_cast<int>(x.size()) != n * n) {
        throw ValidationError("rotate_image: grid is not n*n (n=" + std::to_string(n) + ", size=" +
                              std::to_string(x.size()) + ")");
    }
    times &= 3;
    std::vector<double> cur = x;
    for (int t = 0; t < times; ++t) {
        std::vector<double> next(cur.size());
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                next[static_cast<std::size_t>(i * n + j)] = cur[static_cast<std::size_t>((n - 1 - j) * n + i)];
            }
        }
        cur = std::move(next);
    }
    return cur;
}

int OrbitTable::rotate_qubit(int q) const {
    const auto& orbit = orbits[static_cast<std::size_t>(orbit_of[static_cast<std::size_t>(q)])];
    for (std::size_t m = 0; m < orbit.size(); ++m) {
        if (qubit_of(orbit[m], n) == q) {
            return qubit_of(orbit[(m + 1) % orbit.size()], n);
        }
    }
    throw ValidationError("OrbitTable: inconsistent orbit membership");
}

OrbitTable compute_orbits(int n) {
    if (n < 1) {
        throw ValidationError("compute_orbits: n must be >= 1");
    }
    OrbitTable table;
    table.n = n;
    table.orbit_of.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (table.orbit_of[static_cast<std::size_t>(i * n + j)] >= 0) {
                continue;
            }
            std::vector<PixelIndex> orbit;
            PixelIndex p{i, j};
            for (int t = 0; t < 4; ++t) {
                bool seen = false;
                for (const auto& q : orbit) {
                    seen = seen || q == p;
                }
                if (!seen) {
                    orbit.push_back(p);
                }
                p = rotate_index(p, n);
            }
            const int id = static_cast<int>(table.orbits.size());
            for (const auto& q : orbit) {
                table.orbit_of[static_cast<std::size_t>(qubit_of(q, n))] = id;
            }
            table.orbits.push_back(std::move(orbit));
        }
    }

    // Cell 0 is the top-left floor(n/2) x ceil(n/2) block, plus the center
    // pixel for odd n; cells 1..3 are its rotation images (center excluded).
    const int half_lo = n / 2;
    const int half_hi = (n + 1) / 2;
    std::vector<PixelIndex> cell0;
    for (const auto& orbit : table.orbits) {
        for (const auto& p : orbit) {
            const bool in_quadrant = p.i < half_lo && p.j < half_hi;
            const bool is_center = (n % 2 == 1) && p.i == n / 2 && p.j == n / 2;
            if (in_quadrant || is_center) {
                cell0.push_back(p);
                break;
            }
        }
    }
    if (n == 1) {
        table.cells.push_back(cell0);
        return table;
    }
    for (int c = 0; c < 4; ++c) {
        std::vector<PixelIndex> cell;
        for (const auto& p : cell0) {
            const bool is_center = (n % 2 == 1) && p.i == n / 2 && p.j == n / 2;
            if (is_center && c > 0) {
                continue;
            }
            PixelIndex q = p;
            for (int t = 0; t < c; ++t) {
                q = rotate_index(q, n);
            }
            cell.push_back(q);
        }
        table.cells.push_back(std::move(cell));
    }
    return table;
}

GroupRep build_group_rep(int n) {
    if (n < 1) {
        throw ValidationError("build_group_rep: n must be >= 1");
    }
    GroupRep rep;
    rep.n_qubits = n * n;
    std::vector<int>& identity = rep.perms[0];
    identity.resize(static_cast<std::size_t>(rep.n_qubits));
    for (int q = 0; q < rep.n_qubits; ++q) {
        identity[static_cast<std::size_t>(q)] = q;
    }
    // U_g moves the state of qubit (r,c) to qubit (c, n-1-r)
    std::vector<int> ug(static_cast<std::size_t>(rep.n_qubits));
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            ug[static_cast<std::size_t>(r * n + c)] = c * n + (n - 1 - r);
        }
    }
    rep.perms[1] = ug;
    for (int p = 2; p < 4; ++p) {
        std::vector<int> cur(static_cast<std::size_t>(rep.n_qubits));
        for (int q = 0; q < rep.n_qubits; ++q) {
            cur[static_cast<std::size_t>(q)] = ug[static_cast<std::size_t>(rep.perms[static_cast<std::size_t>(p - 1)][static_cast<std::size_t>(q)])];
        }
        rep.perms[static_cast<std::size_t>(p)] = std::move(cur);
    }
    return rep;
}

std::vector<PauliTerm> twirl_pauli(PauliAxis axis, int qubit, const OrbitTable& table) {
    if (qubit < 0 || qubit >= table.n * table.n) {
        throw ValidationError("twirl_pauli: qubit out of range");
    }
    const auto& orbit = table.orbits[static_cast<std::size_t>(table.orbit_of[static_cast<std::size_t>(qubit)])];
    const double weight = orbit.size() == 1 ? 1.0 : 0.25;
    std::vector<PauliTerm> terms;
    terms.reserve(orbit.size());
    for (const auto& p : orbit) {
        terms.push_back({axis, qubit_of(p, table.n), weight});
    }
    return terms;
}

EquivarianceReport verify_equivariance(const std::vector<GateOp>& gates, const GroupRep& rep, int n_states,
                                       std::uint64_t seed, double tol) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int n = rep.n_qubits;
    EquivarianceReport report;
    for (int trial = 0; trial < n_states; ++trial) {
        StateVector base(n);
        {
            auto& amps = base.amplitudes();
            double norm2 = 0.0;
            for (auto& a : amps) {
                a = cplx{gauss(rng), gauss(rng)};
                norm2 += std::norm(a);
            }
            const double scale = 1.0 / std::sqrt(norm2);
            for (auto& a : amps) {
                a *= scale;
            }
        }
        for (int power = 1; power < 4; ++power) {
            StateVector lhs = base; // W applied after U_g
            lhs.permute_qubits(rep.element(power));
            lhs.apply_all(gates);
            StateVector rhs = base; // U_g applied after W
            rhs.apply_all(gates);
            rhs.permute_qubits(rep.element(power));
            double dev2 = 0.0;
            for (std::size_t b = 0; b < lhs.amplitudes().size(); ++b) {
                dev2 += std::norm(lhs.amplitudes()[b] - rhs.amplitudes()[b]);
            }
            report.max_deviation = std::max(report.max_deviation, std::sqrt(dev2));
        }
    }
    report.equivariant = report.max_deviation < tol;
    return report;
}

} // namespace c4vqc
