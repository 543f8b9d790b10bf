#include "hodp/subterm.hpp"

#include <functional>

namespace hodp {

std::string head_name(const Term& t)
{
    Term h = head(t);
    return h->is_fun() ? h->sym->name : "";
}

int projection_status(const DependencyPair& p, const std::map<std::string, int>& nu)
{
    auto il = nu.find(head_name(p.lhs));
    auto ir = nu.find(head_name(p.rhs));
    if (il == nu.end() || ir == nu.end()) return 0;
    auto la = spine_args(p.lhs);
    auto ra = spine_args(p.rhs);
    if (il->second < 0 || ir->second < 0 || il->second >= static_cast<int>(la.size()) ||
        ir->second >= static_cast<int>(ra.size()))
        return 0;
    const Term& big = la[il->second];
    const Term& small = ra[ir->second];
    if (alpha_equal(big, small)) return 1;
    auto subs = subterms(big);
    for (std::size_t i = 1; i < subs.size(); ++i)
        if (alpha_equal(subs[i], small)) return 2;
    return 0;
}

std::optional<Projection> subterm_criterion(const std::vector<DependencyPair>& scc)
{
    if (scc.empty() || is_collapsing(scc)) return std::nullopt;
    std::vector<std::string> heads;
    std::map<std::string, int> width;
    auto note = [&](const Term& t) {
        std::string h = head_name(t);
        int n = static_cast<int>(spine_args(t).size());
        auto it = width.find(h);
        if (it == width.end()) {
            heads.push_back(h);
            width[h] = n;
        } else {
            it->second = std::min(it->second, n);
        }
    };
    for (auto& p : scc) {
        note(p.lhs);
        note(p.rhs);
    }
    for (auto& h : heads)
        if (h.empty() || width[h] == 0) return std::nullopt;

    // A pair can be judged once both of its heads are assigned.
    std::map<std::string, int> pos;
    for (std::size_t i = 0; i < heads.size(); ++i) pos[heads[i]] = static_cast<int>(i);
    std::vector<std::vector<int>> ready(heads.size());
    for (std::size_t i = 0; i < scc.size(); ++i)
        ready[std::max(pos[head_name(scc[i].lhs)], pos[head_name(scc[i].rhs)])].push_back(static_cast<int>(i));

    std::map<std::string, int> nu;
    std::optional<Projection> best;
    std::function<void(std::size_t)> go = [&](std::size_t k) {
        if (k == heads.size()) {
            Projection p;
            p.nu = nu;
            for (auto& d : scc)
                if (projection_status(d, nu) == 2) p.strict.push_back(d.index);
            if (!p.strict.empty() && (!best || p.strict.size() > best->strict.size())) best = p;
            return;
        }
        for (int i = 0; i < width[heads[k]]; ++i) {
            nu[heads[k]] = i;
            bool ok = true;
            for (int pi : ready[k])
                if (projection_status(scc[pi], nu) == 0) {
                    ok = false;
                    break;
                }
            if (ok) go(k + 1);
        }
        nu.erase(heads[k]);
    };
    go(0);
    return best;
}

}  // namespace hodp
