# quantikit/main.py
import argparse
import logging
import sys
import time
from typing import Callable, Dict, List, Optional, Sequence

from quantikit.config.settings import Settings
from quantikit.core.errors import BadParameter, QuantikitError, SizeCap
from quantikit.core.qcat import (
    coequalizer,
    coproduct,
    equalizer,
    functor_leq,
    initial,
    opposite_category,
    product,
    terminal,
    total_part,
    validate_category,
    validate_functor,
)
from quantikit.core.qchu import (
    chu_coequalizer,
    chu_coproduct,
    chu_equalizer,
    chu_product,
    dom_initial_lift,
    generator_family,
    separate,
    validate_chu_transform,
)
from quantikit.core.qdist import (
    dist_leq,
    graphs,
    identity_distributor,
    presheaf_category,
    transpose,
    validate_distributor,
    yoneda,
)
from quantikit.core.quantaloid import diagonal, opposite, resolve_builtin
from quantikit.serialization.bundle import DefinitionBundle, load_bundle
from quantikit.services.oracle import (
    QCAT_KINDS,
    QCHU_KINDS,
    Certificate,
    OracleService,
    build_suite,
    check_graph_adjunction,
    check_order_equivalence,
)
from quantikit.services.report import ReportService

logger = logging.getLogger(__name__)

CONSTRUCTIONS = ('product', 'coproduct', 'equalizer', 'coequalizer', 'terminal', 'initial', 'presheaf',
                 'diagonal', 'opposite', 'total', 'chu-product', 'chu-coproduct', 'chu-equalizer',
                 'chu-coequalizer', 'dom-lift', 'generators')
CHECKS = ('category', 'functor', 'distributor', 'chu', 'adjunction', 'leq')
ORACLES = QCAT_KINDS + QCHU_KINDS + ('generating', 'mono', 'initial-lift', 'adjunction', 'mutants')


def _names(args: argparse.Namespace, count: Optional[int] = None) -> List[str]:
    """--args 以逗號分隔的名稱"""
    names = [n.strip() for n in (args.args or '').split(',') if n.strip()]
    if count is not None and len(names) != count:
        raise BadParameter(f"{args.kind} needs exactly {count} name(s) in --args, got {len(names)}",
                           {'args': names, 'expected': count})
    return names


def _require_bundle(args: argparse.Namespace) -> DefinitionBundle:
    if not args.bundle:
        raise BadParameter(f"{args.command} {args.kind} needs --bundle", {'command': args.command})
    return load_bundle(args.bundle)


def build_construction(kind: str, args: argparse.Namespace, bundle: DefinitionBundle):
    """
    依種類從 bundle 建立構造

    參數:
        kind: CONSTRUCTIONS 之一
        args: 命令列參數（--args 給出引用的名稱）
        bundle: 已解析的定義檔
    返回:
        Cone、ChuCone、QCategory 或其他構造結果
    """
    Q = bundle.quantaloid
    if kind in ('product', 'coproduct'):
        family = [bundle.lookup('categories', n, '--args') for n in _names(args)]
        return (product if kind == 'product' else coproduct)(family, Q)
    if kind in ('equalizer', 'coequalizer'):
        f, g = (bundle.lookup('functors', n, '--args') for n in _names(args, 2))
        return (equalizer if kind == 'equalizer' else coequalizer)(f, g)
    if kind == 'terminal':
        return terminal(Q)
    if kind == 'initial':
        return initial(Q)
    if kind == 'presheaf':
        X = bundle.lookup('categories', _names(args, 1)[0], '--args')
        return presheaf_category(X)
    if kind == 'diagonal':
        return bundle.diagonal or diagonal(Q)
    if kind == 'opposite':
        names = _names(args)
        if not names:
            return opposite(Q)
        return opposite_category(bundle.lookup('categories', names[0], '--args'))
    if kind == 'total':
        if bundle.diagonal is None:
            raise BadParameter("total needs a bundle over a diagonal quantaloid", {'kind': kind})
        return total_part(bundle.lookup('categories', _names(args, 1)[0], '--args'), bundle.diagonal)
    if kind in ('chu-product', 'chu-coproduct'):
        chu = bundle.chu_objects
        family = []
        for n in _names(args):
            bundle.lookup('distributors', n, '--args')
            family.append(chu[n])
        return (chu_product if kind == 'chu-product' else chu_coproduct)(family, Q)
    if kind in ('chu-equalizer', 'chu-coequalizer'):
        t1, t2 = (bundle.lookup('transforms', n, '--args') for n in _names(args, 2))
        return (chu_equalizer if kind == 'chu-equalizer' else chu_coequalizer)(t1, t2)
    if kind == 'dom-lift':
        cone = bundle.lookup('cones', _names(args, 1)[0], '--args')
        return dom_initial_lift(bundle.diagrams[cone.diagram], cone.apex, cone.legs)
    if kind == 'generators':
        return generator_family(Q, args.mode)
    raise BadParameter(f"unknown construction {kind!r}", {'kind': kind})


def run_validate(args: argparse.Namespace):
    return load_bundle(args.path)


def run_construct(args: argparse.Namespace):
    return build_construction(args.kind, args, _require_bundle(args))


def run_check(args: argparse.Namespace) -> Certificate:
    bundle = _require_bundle(args)
    kind = args.kind
    if kind == 'category':
        X = validate_category(bundle.lookup('categories', args.name, '--name'))
        details = {'objects': len(X)}
        try:
            PX = presheaf_category(X)
        except SizeCap as e:
            logger.warning(f"PX 超過上限，略過 Yoneda 檢查: {e}")
            details['yoneda'] = 'skipped'
        else:
            y = yoneda(X, PX)
            details['yoneda'] = 'fully-faithful'
            details['transpose_matches_yoneda'] = transpose(identity_distributor(X), PX).mapping == y.mapping
        return Certificate('category', True, len(X) ** 2, details=details)
    if kind == 'functor':
        f = validate_functor(bundle.lookup('functors', args.name, '--name'))
        return Certificate('functor', True, len(f.source) ** 2)
    if kind == 'distributor':
        phi = validate_distributor(bundle.lookup('distributors', args.name, '--name'))
        return Certificate('distributor', True, len(phi.value))
    if kind == 'chu':
        t = validate_chu_transform(bundle.lookup('transforms', args.name, '--name'))
        return Certificate('chu', True, len(t.source.domain) * len(t.target.codomain),
                           details={'formulations': 'agree'})
    if kind == 'adjunction':
        return check_graph_adjunction(bundle.lookup('functors', args.name, '--name'))
    if kind == 'leq':
        if not args.other:
            raise BadParameter("check leq needs --other", {'kind': kind})
        f = bundle.lookup('functors', args.name, '--name')
        g = bundle.lookup('functors', args.other, '--other')
        (f_lower, f_upper), (g_lower, g_upper) = graphs(f), graphs(g)
        return Certificate('leq', check_order_equivalence(f, g), 1, details={
            'leq': functor_leq(f, g),
            'lower': dist_leq(g_lower, f_lower),
            'upper': dist_leq(f_upper, g_upper),
        })
    raise BadParameter(f"unknown check {kind!r}", {'kind': kind})


def run_separate(args: argparse.Namespace):
    bundle = load_bundle(args.bundle)
    t1 = bundle.lookup('transforms', args.t1, '--t1')
    t2 = bundle.lookup('transforms', args.t2, '--t2')
    return separate(t1, t2, mode=args.mode)


def run_oracle(args: argparse.Namespace) -> Certificate:
    bundle = _require_bundle(args)
    extra_categories = {n: X for n, X in bundle.categories.items() if len(X) <= Settings.PROBE_OBJECT_CAP}
    extra_chu = {n: phi for n, phi in bundle.chu_objects.items()
                 if max(len(phi.domain), len(phi.codomain)) <= Settings.PROBE_OBJECT_CAP}
    suite = build_suite(bundle.quantaloid, extra_categories, extra_chu, defaults=not args.no_defaults)
    service = OracleService(suite, workers=args.workers)
    kind = args.kind
    if kind in ('terminal', 'initial'):
        return service.check_universal(kind, (product if kind == 'terminal' else coproduct)([], bundle.quantaloid))
    if kind in QCAT_KINDS or kind in QCHU_KINDS:
        return service.check_universal(kind, build_construction(kind, args, bundle))
    if kind == 'generating':
        return service.check_generating(args.mode)
    if kind == 'mono':
        return service.check_mono_characterization(generator_family(bundle.quantaloid, args.mode))
    if kind == 'initial-lift':
        cone = bundle.lookup('cones', _names(args, 1)[0], '--args')
        diagram = bundle.diagrams[cone.diagram]
        return service.check_initial_lift(diagram, dom_initial_lift(diagram, cone.apex, cone.legs))
    if kind == 'adjunction':
        return service.check_adjunctions()
    if kind == 'mutants':
        return service.check_mutants()
    raise BadParameter(f"unknown oracle {kind!r}", {'kind': kind})


def run_builtin(args: argparse.Namespace):
    if args.kind == 'diagonal':
        if not args.of:
            raise BadParameter("builtin diagonal needs --of", {'kind': 'diagonal'})
        if args.of.startswith('builtin:'):
            return diagonal(resolve_builtin(args.of))
        return diagonal(load_bundle(args.of).quantaloid)
    return resolve_builtin(f"builtin:{args.kind}")


tasks: Dict[str, Callable[[argparse.Namespace], object]] = {
    'validate': run_validate,
    'construct': run_construct,
    'check': run_check,
    'separate': run_separate,
    'oracle': run_oracle,
    'builtin': run_builtin,
}


def _builtin_kind(value: str) -> str:
    if value in ('two', 'diagonal') or (value.startswith('chain:') and value[6:].isdigit()):
        return value
    raise argparse.ArgumentTypeError(f"expected two, chain:n or diagonal, got {value!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='quantikit', description="有限 quantaloid 上的 Q-category、分配子與 Chu 構造。")
    parser.add_argument('--output', help="報告輸出檔（預設 stdout）")
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('validate', help="解析並驗證 bundle")
    p.add_argument('path')

    p = sub.add_parser('construct', help="建立 (余)極限與其他構造")
    p.add_argument('kind', choices=CONSTRUCTIONS)
    p.add_argument('--bundle')
    p.add_argument('--args', default='')
    p.add_argument('--mode', choices=('default', 'alternative'), default='default')

    p = sub.add_parser('check', help="檢查單一定義")
    p.add_argument('kind', choices=CHECKS)
    p.add_argument('--bundle')
    p.add_argument('--name', required=True)
    p.add_argument('--other')

    p = sub.add_parser('separate', help="以生成族分離兩個平行 Chu 變換")
    p.add_argument('--bundle', required=True)
    p.add_argument('--t1', required=True)
    p.add_argument('--t2', required=True)
    p.add_argument('--mode', choices=('default', 'alternative'), default='default')

    p = sub.add_parser('oracle', help="窮舉驗證泛性質")
    p.add_argument('kind', choices=ORACLES)
    p.add_argument('--bundle')
    p.add_argument('--args', default='')
    p.add_argument('--mode', choices=('default', 'alternative'), default='default')
    p.add_argument('--workers', type=int, default=None)
    p.add_argument('--no-defaults', action='store_true', help="只使用 bundle 中的探針")

    p = sub.add_parser('builtin', help="輸出內建 quantaloid")
    p.add_argument('kind', type=_builtin_kind)
    p.add_argument('--of')
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    命令列入口

    返回:
        int: 0 成功；1 驗證失敗或反例；2 解析或用法錯誤
    """
    logging.basicConfig(level=getattr(logging, Settings.LOG_LEVEL, logging.INFO),
                        format=Settings.LOG_FORMAT, stream=sys.stderr)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    task_name = args.command if not getattr(args, 'kind', None) else f"{args.command} {args.kind}"
    reporter = ReportService(output=args.output)
    start_time = time.time()
    logger.info(f"從命令列執行任務: {task_name}")
    try:
        result = tasks[args.command](args)
    except QuantikitError as e:
        return reporter.notify_failure(task_name, e, time.time() - start_time)
    except Exception as e:
        logger.error(reporter._format_error_message(task_name, e, time.time() - start_time))
        raise
    return reporter.notify_success(task_name, result, time.time() - start_time)


if __name__ == "__main__":
    sys.exit(main())
