import datetime
import logging
import os
import sys
from itertools import combinations

# 修复路径问题
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from config.settings import ANALYSIS_CONFIG, CACHE_DIR, CATALOGUE_LEVELS, LOG_CONFIG, OUTPUT_DIR, SERIES_CONFIG
from src.analysis import (boundary_band_count, cm_value_scan, deligne_report, distinct_values_count,
                          first_sign_change, integrality_scan, pair_quadrants, pair_sign_density,
                          product_integrality, sign_density, st_histogram)
from src.cache_manager import ApCache
from src.eigenforms import load_eigenform
from src.errors import GMFError
from src.exponents import exponents_from_eigenform, prime_exponents
from src.report_writer import write_json

logger = logging.getLogger("gmfsuite")

# 成对统计只取前两个无 CM 形式；全部组合用 --all-pairs
DEFAULT_PAIRS = [("11", "14")]


def _as_dict(report):
    return report if isinstance(report, dict) else report.to_dict()


class Suite:
    """对目录中的全部形式跑一遍完整的验收流程，每份报告写成一个 JSON"""

    def __init__(self, run_dir: str, xmax: int, limit: int, all_pairs: bool = False):
        self.run_dir = run_dir
        self.xmax = xmax
        self.limit = limit
        self.all_pairs = all_pairs
        self.cache = ApCache(CACHE_DIR)
        self.summary = {}

    def record(self, name: str, report):
        payload = _as_dict(report)
        write_json(os.path.join(self.run_dir, f"{name}.json"), payload)
        checks = payload.get('checks', {})
        self.summary[name] = {'checks': checks, 'passed': all(checks.values())}
        status = "✅" if all(checks.values()) else "⚠️"
        print(f"  {status} {name}")

    def run_form(self, key: str):
        g = load_eigenform(key, max(self.xmax, self.limit), cache=self.cache)
        print(f"\n[{g.label}] 水平 {g.level}{'（CM）' if g.cm else ''}")
        view = prime_exponents(g, self.xmax)
        c = exponents_from_eigenform(g, self.limit)
        self.record(f"{key}_deligne", deligne_report(g, self.xmax))
        self.record(f"{key}_signs", sign_density(view, self.xmax))
        self.record(f"{key}_distinct", distinct_values_count(view, self.xmax))
        self.record(f"{key}_band", boundary_band_count(g, self.xmax))
        self.record(f"{key}_integrality", integrality_scan(c))
        report, _ = product_integrality(c, min(self.limit, SERIES_CONFIG['product_limit']))
        self.record(f"{key}_product", report)
        if g.cm:
            self.record(f"{key}_cmscan", cm_value_scan(g, self.xmax))
        else:
            self.record(f"{key}_satotate", st_histogram(g, self.xmax, ANALYSIS_CONFIG['bins']))
            self.record(f"{key}_firstsign", first_sign_change(c))
        return g

    def run(self):
        forms = {}
        for key in CATALOGUE_LEVELS:
            try:
                forms[key] = self.run_form(key)
            except GMFError as e:
                logger.error(f"❌ {key}: {e}")
                self.summary[key] = {'error': str(e), 'passed': False}

        plain = [k for k, g in forms.items() if not g.cm]
        pairs = list(combinations(plain, 2)) if self.all_pairs else [p for p in DEFAULT_PAIRS if set(p) <= set(plain)]
        for k1, k2 in pairs:
            print(f"\n[成对] {k1} × {k2}")
            v1 = prime_exponents(forms[k1], self.xmax)
            v2 = prime_exponents(forms[k2], self.xmax)
            self.record(f"pair_{k1}_{k2}_signs", pair_sign_density(v1, v2, self.xmax))
            self.record(f"pair_{k1}_{k2}_quadrants", pair_quadrants(v1, v2, self.xmax))

        write_json(os.path.join(self.run_dir, "summary.json"), self.summary)
        return all(entry['passed'] for entry in self.summary.values())


def main():
    logging.basicConfig(level=getattr(logging, LOG_CONFIG['level'].upper(), logging.INFO),
                        format=LOG_CONFIG['format'])
    xmax = ANALYSIS_CONFIG['xmax']
    limit = SERIES_CONFIG['limit']
    all_pairs = '--all-pairs' in sys.argv[1:]

    started = datetime.datetime.now()
    print(f"=== GMF 指数验收流程 开始运行 {started.strftime('%H:%M:%S')} (x={xmax}, M={limit}) ===")
    run_dir = os.path.join(OUTPUT_DIR, f"run_{started.strftime('%Y%m%d_%H%M%S')}")
    os.makedirs(run_dir, exist_ok=True)

    ok = Suite(run_dir, xmax, limit, all_pairs).run()

    elapsed = (datetime.datetime.now() - started).total_seconds()
    print(f"\n=== 完成，用时 {elapsed:.1f}s，结果目录 {run_dir} ===")
    print("✅ 全部检查通过" if ok else "⚠️ 有检查未通过，详见 summary.json")
    return 0 if ok else 4


if __name__ == "__main__":
    sys.exit(main())
