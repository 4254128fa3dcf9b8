// Per-tree point statistics and accuracy/timing figures for 24 field-scanned
// trees, used as golden values for the metrics module.
#pragma once

#include <array>
#include <cstdint>

namespace woodleaf::testing {

struct TreeFixture {
  int tree;
  std::uint64_t total;
  std::uint64_t standard_wood;
  std::uint64_t standard_leaf;
  std::uint64_t true_wood;   // wood predicted wood
  std::uint64_t false_wood;  // leaf predicted wood
  std::uint64_t true_leaf;   // leaf predicted leaf
  std::uint64_t false_leaf;  // wood predicted leaf
  double oa;
  double kappa;
  double mcc;
  double time_ms;
  double ms_per_million;
};

// clang-format off
inline constexpr std::array<TreeFixture, 24> kTrees{{
    { 1,  876657,  150479,  726178,  128879,  1215,  724963,  21600, 0.9739, 0.9032, 0.9066,   935, 1067},
    { 2,  716701,  154548,  562153,  133791,  5647,  556506,  20757, 0.9631, 0.8870, 0.8889,   930, 1298},
    { 3,  629250,  190793,  438457,  166616,  2080,  436377,  24177, 0.9582, 0.8979, 0.9012,   870, 1383},
    { 4,  733233,  169071,  564162,  116880,   651,  563511,  52191, 0.9279, 0.7726, 0.7923,   912, 1244},
    { 5, 1064546,  427139,  637407,  384086,  1592,  635815,  43053, 0.9580, 0.9113, 0.9144,  1901, 1786},
    { 6,  971915,  246251,  725664,  213843,  1899,  723765,  32408, 0.9647, 0.9027, 0.9061,  1350, 1390},
    { 7, 3398859,  719573, 2679286,  638655,  7436, 2671850,  80918, 0.9740, 0.9191, 0.9211,  5547, 1633},
    { 8, 1162123,  312819,  849304,  271612,  4924,  844380,  41207, 0.9603, 0.8952, 0.8983,  1565, 1347},
    { 9, 1068644,  374865,  693779,  289835,  3926,  689853,  85030, 0.9167, 0.8076, 0.8203,  1625, 1521},
    {10, 1210685,  143532, 1067153,  105130,  1653, 1065500,  38402, 0.9669, 0.8219, 0.8331,  1103,  912},
    {11, 1318700,  562884,  755816,  508514,  1065,  754751,  54370, 0.9579, 0.9130, 0.9162,  2456, 1863},
    {12,  742280,  193707,  548573,  140832,  1491,  547082,  52875, 0.9267, 0.7923, 0.8080,   917, 1236},
    {13,  203303,   13301,  190002,    8801,    37,  189965,   4500, 0.9776, 0.7837, 0.8021,   506, 2489},
    {14, 1896619,  482532, 1414087,  420063,  7086, 1407001,  62469, 0.9633, 0.8995, 0.9024,  2981, 1572},
    {15, 1080397,  109269,  971128,   88755,  1962,  969166,  20514, 0.9792, 0.8762, 0.8808,   990,  917},
    {16,  980776,   79224,  901552,   66944,   184,  901368,  12280, 0.9872, 0.9080, 0.9116,   880,  898},
    {17,  841575,  100118,  741457,   76668,  8182,  733275,  23450, 0.9624, 0.8080, 0.8115,   791,  940},
    {18, 1357196,  375669,  981527,  286918,  4034,  977493,  88751, 0.9316, 0.8164, 0.8281,  1789, 1319},
    {19, 4925230, 1329062, 3596168, 1128847,  8731, 3587437, 200215, 0.9575, 0.8872, 0.8919, 12753, 2590},
    {20, 1716488,  727900,  988588,  644566,  6718,  981870,  83334, 0.9475, 0.8910, 0.8949,  3517, 2049},
    {21, 1275620,  215761, 1059859,  179962,  4550, 1055309,  35799, 0.9683, 0.8805, 0.8843,  1334, 1046},
    {22, 1301100,  240684, 1060416,  150458,  1391, 1059025,  90226, 0.9295, 0.7276, 0.7544,  1392, 1070},
    {23, 1315914,  364161,  951753,  279447,  3560,  948193,  84714, 0.9329, 0.8200, 0.8315,  1778, 1352},
    {24,  771395,  165762,  605623,  118643,  1805,  603828,  47119, 0.9365, 0.7913, 0.8065,   938, 1216},
}};
// clang-format on

}  // namespace woodleaf::testing
