#pragma once

// The three motivating programs: each has an expected slice and the
// faulty slice a language model produced for it.

#include <string>
#include <vector>

#include "slicekit/slice.hpp"
#include "slicekit/source_unit.hpp"

namespace slicekit::fixtures {

struct MotivatingExample {
  std::string name;
  std::string code;
  std::string criterion_var;
  int criterion_line = 0;
  std::vector<int> expected_lines;
  std::string expected;   // numbered slice
  std::string generated;  // numbered slice with the fault

  SliceQuery query() const { return {load_unit(code, Lang::java), criterion_var, criterion_line}; }
};

// Extraneous statements: the generated slice adds lines 9 and 10.
inline MotivatingExample extraneous_statements() {
  return {"extraneous-statements",
          "int n = 3;\n"
          "int count = 0;\n"
          "count = count + n;\n"
          "String label = \"sort\";\n"
          "boolean done = false;\n"
          "done = count > n;\n"
          "int temp\n"
          "if(C <= A){\n"
          "temp = A;\n"
          "A = C;\n"
          "C = temp;\n"
          "temp = B;\n"
          "B = temp;\n"
          "}\n",
          "temp",
          12,
          {7, 8, 12},
          "7: int temp\n8: if(C <= A){\n12: temp = B;",
          "7: int temp\n8: if(C <= A){\n9: temp = A;\n10: A = C;\n12: temp = B;"};
}

// Non-existent variable: "keta" replaces "Codepoint". No 'k' occurs in
// the program.
inline MotivatingExample nonexistent_variable() {
  return {"nonexistent-variable",
          "int n = x.length;\n"
          "String s = \"\";\n"
          "int sum = 0;\n"
          "sum = sum + n;\n"
          "s = s + sum;\n"
          "boolean flag = n > 0;\n"
          "int cnt = 0;\n"
          "int total = 0;\n"
          "total = total + n;\n"
          "for(int i=cnt;i>=0;i--) {\n"
          "if(i>0) {long y = x[i];\n"
          "long Codepoint = 97+y};\n"
          "}\n",
          "Codepoint",
          12,
          {7, 10, 11, 12},
          "7: int cnt = 0;\n10: for(int i=cnt;i>=0;i--) {\n11: if(i>0) {long y = x[i];\n12: long Codepoint = 97+y};",
          "7: int cnt = 0;\n10: for(int i=cnt;i>=0;i--) {\n11: if(i>0) {long y = x[i];\n12: long keta = 97+y};"};
}

// Hallucinated statement: line 6 runs on into a repeated product.
inline MotivatingExample hallucinated_statement() {
  return {"hallucinated-statement",
          "String size = \"coins\";\n"
          "int total = 0;\n"
          "total = total + 1;\n"
          "int one = 0, five = 0, ten = n;\n"
          "try {\n"
          "if (one * 1 + five * 5 + ten * 10 > y)\n"
          "return;\n"
          "} catch (Exception e) {\n"
          "return;\n"
          "}\n",
          "one",
          6,
          {4, 5, 6},
          "4: int one = 0, five = 0, ten = n;\n5: try {\n6: if (one * 1 + five * 5 + ten * 10 > y)",
          "4: int one = 0, five = 0, ten = n;\n5: try {\n6: if (one * 1 + five * 5 + ten * 10 > y\n"
          "   * 10 * y * y * y * z * ten * 10 * y * z * ten *"};
}

inline std::vector<MotivatingExample> all() {
  return {extraneous_statements(), nonexistent_variable(), hallucinated_statement()};
}

}  // namespace slicekit::fixtures
