#pragma once

#include <string>

namespace fixtures {

// "John and Mary play tennis together"
inline const std::string kFigure1 =
    "# sent_id = fig1\n"
    "# text = John and Mary play tennis together\n"
    "1\tJohn\tJohn\tPROPN\tNNP\t_\t4\tnsubj\t_\t_\n"
    "2\tand\tand\tCCONJ\tCC\t_\t3\tcc\t_\t_\n"
    "3\tMary\tMary\tPROPN\tNNP\t_\t1\tconj\t_\t_\n"
    "4\tplay\tplay\tVERB\tVBP\t_\t0\troot\t_\t_\n"
    "5\ttennis\ttennis\tNOUN\tNN\t_\t4\tobj\t_\t_\n"
    "6\ttogether\ttogether\tADV\tRB\t_\t4\tadvmod\t_\t_\n"
    "\n";

}  // namespace fixtures
