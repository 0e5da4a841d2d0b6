"""Published fail counts for the benchmark instances, keyed by table.

Only fail counts are kept.  A ``-`` marks a run that returned no result.
"""

from __future__ import annotations

from dataclasses import dataclass

# table goal instances...
# model heuristic fails...
_TABLES = """
table 3 first langford:3,9 langford:3,10
all-diff lex 12 42
c lex 12 43
neq lex 25 82
neq-c lex 12 43
c-neq lex 12 43
alldiff-c lex 12 42
c-alldiff lex 12 42
neq-c-neq lex 12 43
alldiff-c-neq lex 12 42
neq-c-alldiff lex 12 42
alldiff-c-alldiff lex 12 42

table 4 all langford:3,9 langford:3,10 langford:3,11 langford:3,12
all-diff lex 2006 10051 49118 279468
c lex 2282 11336 56234 312926
neq lex 6062 29018 167624 949878
neq-c lex 2282 11336 56234 312926
c-neq lex 2282 11336 56234 312926
alldiff-c lex 2006 10051 49118 279468
c-alldiff lex 2006 10051 49118 279468
neq-c-neq lex 2282 11336 56234 312926
alldiff-c-neq lex 2006 10051 49118 279468
neq-c-alldiff lex 2006 10051 49118 279468
alldiff-c-alldiff lex 2006 10051 49118 279468

table 5 all langford:3,12 langford:3,13 langford:3,14 langford:3,15
neq sd_p 62016 300800 1368322 7515260
all-diff sd_p 20795 93076 405519 2072534
c sd_pd 11683 45271 184745 846851
c sd_p 21148 94795 412882 2112477
c sd_d 15214 59954 249852 1144168
c sd2_pd 11683 45271 184745 846851
c sd2_p 20855 93237 406546 2077692
c sd2_d 14314 56413 234770 1076352
alldiff-c sd_pd 11449 44253 180611 827564
alldiff-c sd_p 20795 93076 405519 2072534
alldiff-c sd_d 14459 56701 234790 1069249
alldiff-c sd2_pd 11451 44254 180631 827605
alldiff-c sd2_p 20488 91513 399092 2037159
alldiff-c sd2_d 13639 53483 221307 1009250

table 6 all qg3:6 qg3:7 qg3:8 qg3:9
neq sd_p 8 100 1895 83630
all-diff sd_p 7 59 955 35198
c sd_pd 7 63 1117 53766
c sd_p 7 59 1039 38196
c sd_d 6 54 888 46539
c sd2_pd 7 63 1117 53785
c sd2_p 7 58 1043 38198
c sd2_d 6 54 887 46741
alldiff-c sd_pd 7 54 999 49678
alldiff-c sd_p 7 59 955 35198
alldiff-c sd_d 5 52 824 43278
alldiff-c sd2_pd 7 54 999 49702
alldiff-c sd2_p 7 58 959 35201
alldiff-c sd2_d 5 52 823 43452

table 7 all qg4:6 qg4:7 qg4:8 qg4:9
neq sd_p 6 82 1779 116298
all-diff sd_p 4 57 892 52419
c sd_pd 6 59 935 55232
c sd_p 6 59 931 55397
c sd_d 6 74 1266 83316
c sd2_pd 6 59 940 55264
c sd2_p 6 59 936 55442
c sd2_d 6 73 1267 82916
alldiff-c sd_pd 4 57 900 52045
alldiff-c sd_p 4 57 892 52419
alldiff-c sd_d 4 67 1102 73997
alldiff-c sd2_pd 4 57 905 52077
alldiff-c sd2_p 4 57 897 52463
alldiff-c sd2_d 4 66 1104 73714

table 8 all golomb:7,25 golomb:8,34 golomb:9,44 golomb:10,55
neq sd_p 912 5543 - -
all-diff sd_p 500 2949 - -
c sd_pd 606 3330 17002 72751
c sd_p 890 5343 - -
c sd_d 626 3390 17151 73539
c sd2_pd 608 3333 17022 72853
c sd2_p 928 5648 - -
c sd2_d 626 3390 17179 73628
alldiff-c sd_pd 493 2771 14313 61572
alldiff-c sd_p 500 2949 - -
alldiff-c sd_d 495 2782 14325 61616
alldiff-c sd2_pd 504 2787 14392 61898
alldiff-c sd2_p 542 3258 - -
alldiff-c sd2_d 495 2794 14400 61893

table 9 first sport:6 sport:8 sport:10 sport:12
neq sd_p 0 1248 1863275 5777382
all-diff sd_p 0 566 1361686 3522705
c sd_pd 624 4 7 5232
c sd_p 0 566 1376143 3537447
c sd_d 589 3 336 6368
c sd2_pd 7 9 1112 46122
c sd2_p 113 6601 820693 -
c sd2_d 514 43 7028 6252
alldiff-c sd_pd 624 4 7 5190
alldiff-c sd_p 0 566 1361686 3522705
alldiff-c sd_d 589 3 329 6262
alldiff-c sd2_pd 7 9 1102 45125
alldiff-c sd2_p 113 6563 812696 -
alldiff-c sd2_d 514 43 6920 6129

table 10 first magic:3 magic:4 magic:5 magic:6
neq sd_p 6 20 1576 -
all-diff sd_p 4 19 1355 2748609
c sd_pd 5 18 4637 -
c sd_p 4 20 1457 3448162
c sd_d 5 37 49312 -
c sd2_pd 5 10 555 463865
c sd2_p 4 11 495 1648408
c sd2_d 5 18 928217 -
alldiff-c sd_pd 5 18 4436 -
alldiff-c sd_p 4 19 1355 -
alldiff-c sd_d 5 5 42426 -
alldiff-c sd2_pd 5 10 435 290103
alldiff-c sd2_p 4 11 355 1083993
alldiff-c sd2_d 5 16 919057 -

table 11 first golomb:8,34 golomb:9,44 golomb:10,55 golomb:11,72
injection-alldiff lex 82 724 3461 18493
injection-c2 lex 104 1110 7122 37404
injection-neq lex 104 1110 7122 37404
injection-alldiff-c2 lex 82 724 3461 18493

table 12 first golomb:8,34 golomb:9,44 golomb:10,55 golomb:11,72
injection-neq sd_p 326 3810 50526 800169
injection-alldiff sd_p 238 2629 32705 563011
injection-c2 sd_pd 11 2010 2288 982
injection-c2 sd_p 326 3810 50526 800169
injection-c2 sd_d 12 2333 2822 1254
injection-c2 sd2_pd 12 2033 2374 984
injection-c2 sd2_p 335 4244 57158 898457
injection-c2 sd2_d 12 2342 2911 1247
injection-alldiff-c2 sd_pd 10 904 1076 598
injection-alldiff-c2 sd_p 238 2629 32705 563011
injection-alldiff-c2 sd_d 11 906 1087 605
injection-alldiff-c2 sd2_pd 10 914 1125 588
injection-alldiff-c2 sd2_p 254 3054 39143 663896
injection-alldiff-c2 sd2_d 11 909 1131 592

table 13 first sport:7 sport:9 sport:11
injection-neq sd_p 14 140287 -
injection-alldiff sd_p 14 138643 -
injection-c2 sd_pd 3 34 43877
injection-c2 sd_p 14 140294 -
injection-c2 sd_d 0 33 1829954
injection-c2 sd2_pd 3 4535 910362
injection-c2 sd2_p 14 143989 -
injection-c2 sd2_d 2 11424 12536523
injection-alldiff-c2 sd_pd 3 28 38555
injection-alldiff-c2 sd_p 14 138643 -
injection-alldiff-c2 sd_d 0 31 374829
injection-alldiff-c2 sd2_pd 3 2013 600686
injection-alldiff-c2 sd2_p 14 142313 -
injection-alldiff-c2 sd2_d 2 3238 1854082
"""


@dataclass(frozen=True)
class ReferenceCell:
    table: int
    instance: str
    model: str
    heuristic: str
    goal: str
    fails: int


def _parse(text: str) -> list[ReferenceCell]:
    cells: list[ReferenceCell] = []
    table, goal, instances = 0, "", []
    for line in text.strip().splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "table":
            table, goal, instances = int(parts[1]), parts[2], parts[3:]
            continue
        model, heuristic, *values = parts
        if len(values) != len(instances):
            raise ValueError(f"table {table}: row {line!r} has the wrong width")
        for inst, v in zip(instances, values):
            if v != "-":
                cells.append(ReferenceCell(table, inst, model, heuristic, goal, int(v)))
    return cells


REFERENCE: tuple[ReferenceCell, ...] = tuple(_parse(_TABLES))

_INDEX = {(c.instance, c.model, c.heuristic, c.goal): c for c in REFERENCE}


def lookup(instance: str, model: str, heuristic: str, goal: str) -> ReferenceCell | None:
    """The published cell for a run, if any.

    ``instance`` is the canonical ``kind:a,b`` string and ``model`` a CLI tag.
    """
    return _INDEX.get((instance, model, heuristic, goal))


def cells_for_table(table: int) -> list[ReferenceCell]:
    return [c for c in REFERENCE if c.table == table]
