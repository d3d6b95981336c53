#include "redistplan/schedule.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace redistplan {

namespace {

template <class T>
void rotate_rows(Table<T>& t, const GridShape& p) {
    const int C = t.cols();
    std::vector<T> tmp(static_cast<std::size_t>(C));
    for (int i = 0; i < t.rows(); ++i) {
        const int shift = (p.cols * (i % p.rows)) % C;
        if (shift == 0) continue;
        auto row = t.row(i);
        for (int j = 0; j < C; ++j) tmp[(j + shift) % C] = row[j];
        std::copy(tmp.begin(), tmp.end(), row.begin());
    }
}

template <class T>
void rotate_cols(Table<T>& t, const GridShape& p) {
    const int R = t.rows();
    std::vector<T> tmp(static_cast<std::size_t>(R));
    for (int j = 0; j < t.cols(); ++j) {
        const int shift = (p.rows * (j % p.cols)) % R;
        if (shift == 0) continue;
        for (int i = 0; i < R; ++i) tmp[(i + shift) % R] = t(i, j);
        for (int i = 0; i < R; ++i) t(i, j) = tmp[i];
    }
}

template <class Fn>
void for_each_table(ShiftableTables& tables, Fn&& fn) {
    fn(tables.pm.cells);
    fn(tables.idpc.cells);
    for (auto& t : tables.layout.tables) fn(t);
}

OwnerTable owner_table(const SuperblockDims& dims, const GridShape& g, OwnerRole role) {
    OwnerTable t{Table<Pid>(dims.R, dims.C), role};
    for (int i = 0; i < dims.R; ++i)
        for (int j = 0; j < dims.C; ++j) t.cells(i, j) = g.cols * (i % g.rows) + (j % g.cols);
    return t;
}

}  // namespace

const char* to_string(ShiftCase c) noexcept {
    switch (c) {
        case ShiftCase::None: return "none";
        case ShiftCase::RowShift: return "row";
        case ShiftCase::ColumnShift: return "column";
        case ShiftCase::ColumnRowShift: return "column+row";
    }
    return "none";
}

ShiftCase parse_shift_case(std::string_view text) {
    for (auto c : {ShiftCase::None, ShiftCase::RowShift, ShiftCase::ColumnShift, ShiftCase::ColumnRowShift})
        if (text == to_string(c)) return c;
    throw std::invalid_argument("unknown shift case '" + std::string(text) + "'");
}

SuperblockDims compute_superblock(const RedistProblem& problem) {
    SuperblockDims d;
    d.R = lcm(problem.src.rows, problem.dst.rows);
    d.C = lcm(problem.src.cols, problem.dst.cols);
    const int n = problem.blocks.nblocks();
    d.supR = n / d.R;
    d.supC = n / d.C;
    d.sup = d.supR * d.supC;
    return d;
}

LayoutArray build_layout(const RedistProblem& problem, const SuperblockDims& dims) {
    const auto& p = problem.src;
    LayoutArray layout;
    layout.tables.reserve(static_cast<std::size_t>(dims.sup));
    int sr = 0, sc = 0;
    for (int s = 0; s < dims.sup; ++s) {
        Table<BlockCoord> t(dims.R, dims.C);
        for (int i = 0; i < dims.R / p.rows; ++i)
            for (int j = 0; j < dims.C / p.cols; ++j)
                for (int k = 0; k < p.rows; ++k)
                    for (int l = 0; l < p.cols; ++l) {
                        const int row = i * p.rows + k;
                        const int col = j * p.cols + l;
                        t(row, col) = {sr * dims.R + row, sc * dims.C + col};
                    }
        layout.tables.push_back(std::move(t));
        if (sc + 1 == dims.supC) {
            ++sr;
            sc = 0;
        } else {
            ++sc;
        }
    }
    return layout;
}

OwnerTable build_idpc(const SuperblockDims& dims, const GridShape& p) {
    return owner_table(dims, p, OwnerRole::Initial);
}

OwnerTable build_fdpc(const SuperblockDims& dims, const GridShape& q) {
    return owner_table(dims, q, OwnerRole::Final);
}

TransferTable build_transfer(const OwnerTable& idpc, const OwnerTable& pm, const GridShape& p,
                             const Table<RelCoord>* carried) {
    const int R = idpc.cells.rows(), C = idpc.cells.cols();
    if (pm.cells.rows() != R || pm.cells.cols() != C)
        throw ColumnOverflow("owner tables differ in shape");
    const int nsrc = p.size();
    if ((R * C) % nsrc != 0) throw ColumnOverflow("superblock size not a multiple of P");
    const int steps = R * C / nsrc;

    TransferTable t{Table<Pid>(steps, nsrc, -1), Table<RelCoord>(steps, nsrc)};
    std::vector<int> next(static_cast<std::size_t>(nsrc), 0);
    for (int i = 0; i < R; ++i) {
        for (int j = 0; j < C; ++j) {
            const Pid src = idpc.cells(i, j);
            if (src < 0 || src >= nsrc) throw ColumnOverflow("source pid out of range");
            int& row = next[static_cast<std::size_t>(src)];
            if (row >= steps)
                throw ColumnOverflow("column " + std::to_string(src) + " overflows " +
                                     std::to_string(steps) + " steps");
            t.dest(row, src) = pm.cells(i, j);
            t.coords(row, src) = carried ? (*carried)(i, j) : RelCoord{i, j};
            ++row;
        }
    }
    for (int k = 0; k < nsrc; ++k)
        if (next[static_cast<std::size_t>(k)] != steps)
            throw ColumnOverflow("column " + std::to_string(k) + " underfilled");
    return t;
}

RecvTable build_recv(const TransferTable& transfer, const GridShape& q) {
    RecvTable r{Table<Pid>(transfer.steps(), q.size(), -1)};
    for (int i = 0; i < transfer.steps(); ++i) {
        for (int j = 0; j < transfer.sources(); ++j) {
            const Pid d = transfer.dest(i, j);
            if (d < 0 || d >= q.size()) throw std::out_of_range("destination pid out of range");
            if (r.cells(i, d) != -1)
                throw ContentionPresent("step " + std::to_string(i) + ": sources " +
                                        std::to_string(r.cells(i, d)) + " and " + std::to_string(j) +
                                        " both target " + std::to_string(d));
            r.cells(i, d) = j;
        }
    }
    return r;
}

long long count_contentions(const TransferTable& transfer) {
    long long total = 0;
    std::vector<int> hits;
    for (int i = 0; i < transfer.steps(); ++i) {
        auto row = transfer.dest.row(i);
        const int hi = row.empty() ? 0 : *std::max_element(row.begin(), row.end());
        hits.assign(static_cast<std::size_t>(hi) + 1, 0);
        for (Pid d : row)
            if (d >= 0 && hits[static_cast<std::size_t>(d)]++ > 0) ++total;
    }
    return total;
}

ShiftCase select_shift_case(const GridShape& p, const GridShape& q) noexcept {
    const bool rows_shrink = p.rows > q.rows;
    const bool cols_shrink = p.cols > q.cols;
    if (rows_shrink && cols_shrink) return ShiftCase::ColumnRowShift;
    if (rows_shrink) return ShiftCase::RowShift;
    if (cols_shrink) return ShiftCase::ColumnShift;
    return ShiftCase::None;
}

void apply_shifts(ShiftCase shift_case, const GridShape& p, ShiftableTables& tables) {
    switch (shift_case) {
        case ShiftCase::None:
            break;
        case ShiftCase::RowShift:
            for_each_table(tables, [&](auto& t) { rotate_rows(t, p); });
            break;
        case ShiftCase::ColumnShift:
            for_each_table(tables, [&](auto& t) { rotate_cols(t, p); });
            break;
        case ShiftCase::ColumnRowShift:
            for_each_table(tables, [&](auto& t) { rotate_cols(t, p); });
            for_each_table(tables, [&](auto& t) { rotate_rows(t, p); });
            break;
    }
}

Table<RelCoord> relative_coords(const LayoutArray& layout, const SuperblockDims& dims) {
    Table<RelCoord> rel(dims.R, dims.C);
    if (layout.tables.empty()) return rel;
    // Superblock 0 sits at the origin, so its global coordinates are relative.
    const auto& first = layout.tables.front();
    for (int i = 0; i < dims.R; ++i)
        for (int j = 0; j < dims.C; ++j) rel(i, j) = {first(i, j).x, first(i, j).y};
    return rel;
}

RedistributionPlan plan(const RedistProblem& problem, const PlanOptions& options) {
    validate(problem);
    RedistributionPlan out;
    out.problem = problem;
    out.dims = compute_superblock(problem);

    OwnerTable idpc = build_idpc(out.dims, problem.src);
    OwnerTable fdpc = build_fdpc(out.dims, problem.dst);
    out.transfer = build_transfer(idpc, fdpc, problem.src);
    out.contentions_before = count_contentions(out.transfer);
    out.contentions_after = out.contentions_before;

    if (out.contentions_before > 0) {
        out.shift_case = select_shift_case(problem.src, problem.dst);
        if (options.enable_shifts && out.shift_case != ShiftCase::None) {
            ShiftableTables tables{fdpc, std::move(idpc), build_layout(problem, out.dims)};
            tables.pm.role = OwnerRole::Mapping;
            apply_shifts(out.shift_case, problem.src, tables);
            const auto carried = relative_coords(tables.layout, out.dims);
            auto shifted = build_transfer(tables.idpc, tables.pm, problem.src, &carried);
            const long long after = count_contentions(shifted);
            if (after <= out.contentions_before) {
                out.transfer = std::move(shifted);
                out.contentions_after = after;
                out.shifts_applied = true;
            }
        }
    }
    if (out.contentions_after == 0) out.recv = build_recv(out.transfer, problem.dst);
    return out;
}

}  // namespace redistplan
