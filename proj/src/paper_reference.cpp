#include "qgreeks/experiments.hpp"

namespace qgreeks {

namespace {

// Reference prices and in-sample errors by budget 2^p for both instruments
// and both estimator pipelines.
constexpr PriceRef kPrices[] = {
    {10, 5.96901, 2.71e-2, 3.73727, 1.51e-2, 5.98531, 3.00e-3, 3.71045, 7.33e-4},
    {11, 5.95949, 1.93e-2, 3.69438, 1.09e-2, 5.98625, 2.30e-3, 3.71186, 4.41e-4},
    {12, 5.98656, 1.36e-2, 3.69959, 7.67e-3, 5.98820, 1.66e-3, 3.71174, 2.49e-4},
    {13, 5.97346, 9.60e-3, 3.71412, 5.42e-3, 5.98654, 1.01e-3, 3.71198, 1.37e-4},
    {14, 5.98509, 6.71e-3, 3.71865, 3.89e-3, 5.98655, 7.86e-4, 3.71194, 9.70e-5},
    {15, 5.98832, 4.81e-3, 3.71473, 2.70e-3, 5.98632, 5.46e-4, 3.71198, 5.19e-5},
    {16, 5.98632, 3.39e-3, 3.71244, 1.94e-3, 5.98604, 3.72e-4, 3.71193, 3.40e-5},
    {17, 5.98582, 2.40e-3, 3.71170, 1.37e-3, 5.98590, 2.53e-4, 3.71198, 1.99e-5},
    {18, 5.98819, 1.69e-3, 3.71371, 9.67e-4, 5.98628, 1.71e-4, 3.71198, 1.27e-5},
};

constexpr Scheme ED = Scheme::Euler;
constexpr Scheme BBD = Scheme::BrownianBridge;
constexpr GreekMethod FD = GreekMethod::FiniteDifference;
constexpr GreekMethod CI = GreekMethod::ChebyshevInterpolation;
constexpr GreekMethod CPW = GreekMethod::ConditionalPathwise;

// Down-and-out call (B = 90): sum of main indices, average dimension, type.
constexpr GsaRef kGsaDo[] = {
    {GreekKind::Delta, ED, FD, false, 0.07, 11.29, 'C'},
    {GreekKind::Delta, BBD, FD, false, 0.10, 5.05, 'C'},
    {GreekKind::Delta, ED, CI, false, 0.28, 7.04, 'C'},
    {GreekKind::Delta, BBD, CI, false, 0.40, 3.10, 'C'},
    {GreekKind::Delta, ED, CPW, false, 0.66, 2.53, 'B'},
    {GreekKind::Delta, BBD, CPW, false, 0.80, 1.43, 'A'},
    {GreekKind::Delta, ED, FD, true, 0.76, 2.61, 'B'},
    {GreekKind::Delta, BBD, FD, true, 0.98, 1.01, 'A'},
    {GreekKind::Delta, ED, CI, true, 0.77, 2.53, 'B'},
    {GreekKind::Delta, BBD, CI, true, 0.98, 1.01, 'A'},

    {GreekKind::Gamma, ED, FD, false, 0.02, 12.56, 'C'},
    {GreekKind::Gamma, BBD, FD, false, 0.02, 5.68, 'C'},
    {GreekKind::Gamma, ED, CI, false, 0.04, 10.97, 'C'},
    {GreekKind::Gamma, BBD, CI, false, 0.06, 4.40, 'C'},
    {GreekKind::Gamma, ED, CPW, false, 0.03, 7.57, 'C'},
    {GreekKind::Gamma, BBD, CPW, false, 0.23, 3.23, 'C'},
    {GreekKind::Gamma, ED, FD, true, 0.06, 16.0, 'C'},
    {GreekKind::Gamma, BBD, FD, true, 0.81, 1.29, 'A'},
    {GreekKind::Gamma, ED, CI, true, 0.06, 16.0, 'C'},
    {GreekKind::Gamma, BBD, CI, true, 0.82, 1.26, 'A'},

    {GreekKind::Vega, ED, FD, false, 0.03, 12.27, 'C'},
    {GreekKind::Vega, BBD, FD, false, 0.03, 5.90, 'C'},
    {GreekKind::Vega, ED, CI, false, 0.33, 4.55, 'C'},
    {GreekKind::Vega, BBD, CI, false, 0.57, 2.37, 'C'},
    {GreekKind::Vega, ED, CPW, false, 0.47, 2.11, 'B'},
    {GreekKind::Vega, BBD, CPW, false, 0.79, 1.38, 'A'},
    {GreekKind::Vega, ED, FD, true, 0.65, 1.45, 'B'},
    {GreekKind::Vega, BBD, FD, true, 1.00, 1.00, 'A'},
    {GreekKind::Vega, ED, CI, true, 0.65, 1.45, 'B'},
    {GreekKind::Vega, BBD, CI, true, 1.00, 1.00, 'A'},

    {GreekKind::Vomma, ED, FD, false, 0.02, 13.55, 'C'},
    {GreekKind::Vomma, BBD, FD, false, 0.01, 5.69, 'C'},
    {GreekKind::Vomma, ED, CI, false, 0.03, 10.87, 'C'},
    {GreekKind::Vomma, BBD, CI, false, 0.03, 4.80, 'C'},
    {GreekKind::Vomma, ED, CPW, false, 0.07, 6.69, 'C'},
    {GreekKind::Vomma, BBD, CPW, false, 0.14, 3.52, 'C'},
    {GreekKind::Vomma, ED, FD, true, 0.13, 2.97, 'B'},
    {GreekKind::Vomma, BBD, FD, true, 0.99, 1.03, 'A'},
    {GreekKind::Vomma, ED, CI, true, 0.12, 2.90, 'B'},
    {GreekKind::Vomma, BBD, CI, true, 0.98, 1.03, 'A'},
};

// Arithmetic Asian call (K = 100).
constexpr GsaRef kGsaAsian[] = {
    {GreekKind::Delta, ED, FD, false, 0.66, 3.88, 'B'},
    {GreekKind::Delta, BBD, FD, false, 0.75, 1.71, 'A'},
    {GreekKind::Delta, ED, CI, false, 0.75, 2.45, 'B'},
    {GreekKind::Delta, BBD, CI, false, 0.80, 1.31, 'A'},
    {GreekKind::Delta, ED, CPW, false, 0.83, 1.60, 'B'},
    {GreekKind::Delta, BBD, CPW, false, 0.88, 1.18, 'A'},

    {GreekKind::Gamma, ED, FD, false, 0.05, 30.37, 'C'},
    {GreekKind::Gamma, BBD, FD, false, 0.05, 21.41, 'C'},
    {GreekKind::Gamma, ED, CI, false, 0.04, 12.97, 'C'},
    {GreekKind::Gamma, BBD, CI, false, 0.11, 3.17, 'C'},
    {GreekKind::Gamma, ED, CPW, false, 0.05, 5.87, 'C'},
    {GreekKind::Gamma, BBD, CPW, false, 0.26, 2.34, 'C'},

    {GreekKind::Vega, ED, FD, false, 0.69, 1.42, 'B'},
    {GreekKind::Vega, BBD, FD, false, 0.87, 1.14, 'A'},
    {GreekKind::Vega, ED, CI, false, 0.69, 1.42, 'B'},
    {GreekKind::Vega, BBD, CI, false, 0.87, 1.14, 'A'},
    {GreekKind::Vega, ED, CPW, false, 0.71, 1.34, 'A'},
    {GreekKind::Vega, BBD, CPW, false, 0.87, 1.13, 'A'},

    {GreekKind::Vomma, ED, FD, false, 0.07, 27.20, 'C'},
    {GreekKind::Vomma, BBD, FD, false, 0.13, 27.32, 'C'},
    {GreekKind::Vomma, ED, CI, false, 0.15, 4.89, 'C'},
    {GreekKind::Vomma, BBD, CI, false, 0.63, 2.52, 'C'},
    {GreekKind::Vomma, ED, CPW, false, 0.18, 2.23, 'C'},
    {GreekKind::Vomma, BBD, CPW, false, 0.67, 1.37, 'B'},
};

} // namespace

std::span<const PriceRef> reference_price_table() { return kPrices; }
std::span<const GsaRef> reference_gsa_do_table() { return kGsaDo; }
std::span<const GsaRef> reference_gsa_asian_table() { return kGsaAsian; }

const GsaRef* find_gsa_ref(std::span<const GsaRef> table, GreekKind kind, Scheme scheme,
                           GreekMethod method, bool importance_sampling) {
    for (const auto& row : table) {
        if (row.greek == kind && row.scheme == scheme && row.method == method &&
            row.importance_sampling == importance_sampling) {
            return &row;
        }
    }
    return nullptr;
}

} // namespace qgreeks
