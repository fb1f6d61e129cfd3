#include "cobarforge/conventions.hpp"

#include <sstream>

namespace cobarforge {

namespace {

uint64_t fnv1a(const std::string& s)
{
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

const char* eta_name(Conventions::EtaVariant v)
{
    switch (v) {
        case Conventions::EtaVariant::StrictCollapse: return "strict-collapse";
        case Conventions::EtaVariant::StripBlind: return "strip-blind";
        case Conventions::EtaVariant::StripSorted: return "strip-sorted";
    }
    return "?";
}

}  // namespace

std::string Conventions::describe() const
{
    std::ostringstream os;
    os << "mixed_cup_zero=" << (mixed_cup_zero ? 1 : 0);
    for (const auto& [key, val] : cup_overrides)
        os << ";cup" << std::get<0>(key) << "(" << std::get<1>(key) << "," << std::get<2>(key)
           << ")=" << val;
    os << ";swap_on_odd_k=" << (swap_on_odd_k ? 1 : 0);
    os << ";split_first_letter=" << (split_first_letter ? 1 : 0);
    os << ";pipeline_eta=" << eta_name(pipeline_eta);
    os << ";strip_letters_in_cup=" << (strip_letters_in_cup ? 1 : 0);
    os << ";seed_dh1=" << (seed_dh1 ? 1 : 0);
    return os.str();
}

uint64_t Conventions::hash() const
{
    return fnv1a(describe());
}

const Conventions& Conventions::shipped()
{
    static const Conventions c{};
    return c;
}

}  // namespace cobarforge
