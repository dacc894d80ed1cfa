"""
Workbench - Main entry point for minirec runs

Coordinates the set evaluator, the numerical modules and the artifact
store. Every subcommand of the command line maps to one method here.
"""

import json
import logging
import os
import shutil
import tempfile
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Callable, Dict, List, Optional, Tuple

from sympy import factorint

from ..storage.engine import ArtifactStore, ResultEncoder, read_json
from .bohr import (BohrHammingSpec, BohrSpec, bh_contains, bh_counts, bohr_contains, bohr_enumerate,
                   char_cover, check_sumset_containment, enumeration_rows, hamming_ball_contains,
                   HammingBall, shifted_bh_cover)
from .config import RunConfig
from .construction import (build_cantor, build_ks_pipeline, check_families, continuity_check,
                           kronecker_condition, rigidity_profile, stage_measure)
from .diophantine import ApproxQuery, EmbeddingTable, embed_group, kronecker_approximate
from .dynamics import (BoxSet, aura_demo, bohr_aura, bohr_return_check, cyclic_system,
                       delta_recurrence_falsify, intersection_bounds, measure, product_system,
                       return_set, structured_corpus, torus_system, upper_banach_density)
from .errors import ConfigError, EmbeddingError, NotFound
from .kleitman import (HammingWitness, KleitmanInstance, Mode, empirical_dimension,
                       hamming_recurrence_witness, kleitman_check)
from .sets import SetEvaluator, frequency_from_terms
from .torus import (DEFAULT_CERTIFICATE_BOUND, FrequencyVector, Verdict, certify,
                    make_independent_frequencies, orbit_norms)
from .windows import Window, WindowedSet, spiral

logger = logging.getLogger(__name__)

# result files whose names are fixed by the command line contract
RESULT_FILES = {
    ('ks', 'build'): 'stages.json',
}


@dataclass
class RunResult:
    """Outcome of one subcommand"""
    summary: str
    payload: Dict[str, Any] = field(default_factory=dict)
    violations: List[str] = field(default_factory=list)
    artifacts: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def result_name(command: str, action: str) -> str:
    return RESULT_FILES.get((command, action), f"{command}_{action.replace('-', '_')}.json")


class Workbench:
    """
    minirec workbench.

    Usage:
        bench = Workbench()
        config = RunConfig.from_sources('bohr', 'enumerate',
                                        flag_values={'freq': 'sqrt(2)', 'eta': '0.15', 'window': '0:10'})
        result = bench.run(config)
        print(result.summary)
    """

    def __init__(self, base_dir: str = "."):
        self.base_dir = base_dir
        self._handlers: Dict[Tuple[str, str], Callable[[RunConfig, ArtifactStore], RunResult]] = {
            ('bohr', 'enumerate'): self.bohr_enumerate,
            ('bh', 'enumerate'): self.bh_enumerate,
            ('bh', 'check-sumset'): self.bh_check_sumset,
            ('bh', 'cover'): self.bh_cover,
            ('kronecker', 'solve'): self.kronecker_solve,
            ('kronecker', 'embed'): self.kronecker_embed,
            ('system', 'returns'): self.system_returns,
            ('system', 'aura'): self.system_aura,
            ('system', 'bohr-check'): self.system_bohr_check,
            ('density', 'falsify'): self.density_falsify,
            ('density', 'estimate'): self.density_estimate,
            ('kleitman', 'verify'): self.kleitman_verify,
            ('kleitman', 'witness'): self.kleitman_witness,
            ('kleitman', 'dimension'): self.kleitman_dimension,
            ('ks', 'build'): self.ks_build,
            ('ks', 'profile'): self.ks_profile,
            ('ks', 'kronecker'): self.ks_kronecker,
        }

    def run(self, config: RunConfig) -> RunResult:
        """
        Execute one subcommand and write its artifacts.

        Returns:
            RunResult with the summary, the payload written to the result
            file, the artifact paths and any invariant violations
        """
        handler = self._handlers.get((config.command, config.action))
        if handler is None:
            raise ConfigError(f"unknown subcommand '{config.command} {config.action}'")
        store = ArtifactStore(config.output_dir)
        start = time.perf_counter()
        result = handler(config, store)
        document = {
            'command': config.command,
            'action': config.action,
            'config': config.to_dict()['values'],
            'result': result.payload,
            'violations': result.violations,
        }
        if config.timings:
            document['runtime'] = round(time.perf_counter() - start, 6)
        store.write_json(result_name(config.command, config.action), document)
        result.artifacts = list(store.written)
        return result

    # ------------------------------------------------------------------
    # shared helpers
    # ------------------------------------------------------------------

    def _evaluator(self, config: RunConfig) -> SetEvaluator:
        return SetEvaluator(self.base_dir, config.precision_bits, config.guard)

    def _frequency(self, config: RunConfig, key: str = 'freq') -> FrequencyVector:
        terms = config.get(key)
        if terms:
            freq = frequency_from_terms(terms, config.precision_bits)
            if freq.exact:
                return freq
            bound, passed = certify(freq, DEFAULT_CERTIFICATE_BOUND, config.guard, config.caps.certificate_cap)
            if not passed:
                logger.warning("Frequencies %s fail the small-relation scan up to %d", freq, bound)
            # square roots of distinct squarefree integers are independent together with 1
            radicands = [g.prime for g in freq.generators if g is not None]
            independent = (len(set(radicands)) == freq.d
                           and all(max(factorint(p).values()) == 1 for p in radicands))
            return FrequencyVector(freq.entries, freq.generators, bound, passed and independent, config.guard)
        d = config.get('d')
        if d is None:
            raise ConfigError("give either freq or d", key)
        return make_independent_frequencies(d, precision_bits=config.precision_bits,
                                            certificate_cap=config.caps.certificate_cap)

    def _system(self, config: RunConfig):
        system = None
        if config.get('freq') or config.get('d'):
            system = torus_system(self._frequency(config))
        cyclic = config.get('cyclic')
        if cyclic:
            if len(cyclic) != 2:
                raise ConfigError("expected k,step", 'cyclic')
            factor = cyclic_system(cyclic[0], cyclic[1])
            system = factor if system is None else product_system(system, factor)
        if system is None:
            raise ConfigError("give freq, d or cyclic", 'freq')
        return system

    def _boxes(self, config: RunConfig, system) -> BoxSet:
        if config.get('boxes'):
            return BoxSet.from_dict(config['boxes'])
        eta = config.get('eta')
        if eta is None:
            raise ConfigError("give eta or boxes", 'eta')
        torus_d = sum(1 for c in system.coordinates if c.alpha is not None)
        base = BoxSet.corner_box(torus_d, eta) if config['form'] == 'corner' else BoxSet.bohr_box(torus_d, eta)
        factors = iter(base.boxes[0])
        # cyclic coordinates default to the residue 0
        return BoxSet((tuple(next(factors) if c.alpha is not None else frozenset([0])
                             for c in system.coordinates),))

    # ------------------------------------------------------------------
    # bohr / bh
    # ------------------------------------------------------------------

    def bohr_enumerate(self, config: RunConfig, store: ArtifactStore) -> RunResult:
        freq = self._frequency(config)
        window = config['window']
        spec = BohrSpec(freq, config['eta'], config.guard)
        members = bohr_enumerate(spec, window)
        table = orbit_norms(freq, window.values())
        flags = {n: 'yes' for n in members.members}
        flags.update({n: 'ambiguous' for n in members.ambiguous})
        rows = [[int(n)] + [float(v) for v in table.values[i]] + [flags.get(int(n), 'no')]
                for i, n in enumerate(table.ns)]
        store.write_csv('bohr_enumerate.csv', ['n'] + [f"norm_{j + 1}" for j in range(freq.d)] + ['member'], rows)
        summary = (f"{spec.describe()} on {window}: {len(members)} members"
                   + (f", {len(members.ambiguous)} ambiguous" if members.ambiguous else "")
                   + (" (degenerate: eta > 1/2)" if spec.degenerate else ""))
        return RunResult(summary, {'spec': spec.to_dict(), 'set': members.to_dict()})

    def bh_enumerate(self, config: RunConfig, store: ArtifactStore) -> RunResult:
        freq = self._frequency(config)
        window = config['window']
        spec = BohrHammingSpec(freq, config['eps'], config['eta_frac'], config['shift'],
                               config.get('targets'), config.guard)
        counts = bh_counts(spec, window.values())
        members = WindowedSet.from_mask(window, counts.yes, spec.describe(), counts.ambiguous)
        store.write_csv('bh_enumerate.csv', ['n'] + [f"norm_{j + 1}" for j in range(freq.d)] + ['member'],
                        enumeration_rows(counts))
        summary = f"{spec.describe()} on {window}: {len(members)} members (threshold {spec.threshold} of {spec.d})"
        return RunResult(summary, {'spec': spec.to_dict(), 'set': members.to_dict()})

    def bh_check_sumset(self, config: RunConfig, store: ArtifactStore) -> RunResult:
        freq = self._frequency(config)
        report = check_sumset_containment(freq, config['eps'], config['eta_frac'], config['window'], config.guard)
        violations = [f"{report.statement} fails at b={b}, h={h}" for b, h in report.violations]
        verdict = "holds" if report.holds else "FAILS"
        summary = f"{report.statement}: {verdict} on {report.window} ({report.checked} translates checked)"
        return RunResult(summary, report.to_dict(), violations)

    def bh_cover(self, config: RunConfig, store: ArtifactStore) -> RunResult:
        freq = self._frequency(config)
        cover = char_cover if config['form'] == 'char' else shifted_bh_cover
        try:
            report = cover(freq, config['z'], config['eps'], config['eta_frac'], config['search_bound'],
                           config['window'], config.guard, config['strategy'])
        except NotFound as e:
            payload = {'found': False, 'best_n': e.best_n,
                       'best_norm': None if e.best_norm is None else float(e.best_norm), 'message': str(e)}
            return RunResult(f"No shift found: {e}", payload)
        violations = [f"{report.statement} fails at n={h}" for _, h in report.containment.violations]
        payload = dict(report.to_dict(), found=True)
        return RunResult(f"m={report.m}: {report.statement} {'holds' if report.holds else 'FAILS'}",
                         payload, violations)

    # ------------------------------------------------------------------
    # kronecker
    # ------------------------------------------------------------------

    def kronecker_solve(self, config: RunConfig, store: ArtifactStore) -> RunResult:
        freq = self._frequency(config)
        query = ApproxQuery(freq, config['target'], config['eps'], config['search_bound'],
                            config['strategy'], config['exclude_zero'], config.guard)
        try:
            result = kronecker_approximate(query)
        except NotFound as e:
            payload = {'found': False, 'best_n': e.best_n,
                       'best_norm': None if e.best_norm is None else float(e.best_norm)}
            return RunResult(f"No n with |n| <= {query.search_bound}: {e}", payload)
        payload = dict(result.to_dict(), found=True, freq=freq.to_dict())
        return RunResult(f"n={result.n} (max norm {result.max_norm:.6g}, {result.strategy})", payload)

    def kronecker_embed(self, config: RunConfig, store: ArtifactStore) -> RunResult:
        freq = self._frequency(config)
        try:
            table = embed_group(freq, config['k'], config['eps'], config['search_bound'],
                                config.caps.embedding_cap, config.guard)
        except EmbeddingError as e:
            payload = {'found': False, 'failures': [list(w) for w in e.failures]}
            return RunResult(str(e), payload)
        violations = table.check(freq, config.guard)
        rows = [list(w) + [n] for w, n in sorted(table.mapping.items())]
        store.write_csv('kronecker_embed.csv', [f"w_{j + 1}" for j in range(freq.d)] + ['n'], rows)
        payload = dict(table.to_dict(), found=True, freq=freq.to_dict())
        span = max(abs(n) for n in table.values())
        return RunResult(f"Embedded Z_{table.k}^{table.d} into [-{span}, {span}]", payload, violations)

    # ------------------------------------------------------------------
    # dynamics
    # ------------------------------------------------------------------

    def system_returns(self, config: RunConfig, store: ArtifactStore) -> RunResult:
        system = self._system(config)
        D = self._boxes(config, system)
        returns = return_set(system, D, config['c'], config['window'])
        store.write_csv('system_returns.csv', ['n', 'measure', 'member'], returns.rows())
        payload = dict(returns.to_dict(), measure=str(measure(system, D)))
        summary = (f"R_{returns.c} on {returns.window}: {len(returns.members)} return times"
                   + (f", {len(returns.ambiguous)} ambiguous" if returns.ambiguous else ""))
        return RunResult(summary, payload)

    def system_aura(self, config: RunConfig, store: ArtifactStore) -> RunResult:
        evaluator = self._evaluator(config)
        window = config['window']
        S = evaluator.enumerate(config['set'], window)
        E = evaluator.enumerate(config['e'], window)
        if config['bohr']:
            report = bohr_aura(S, E, BohrSpec(self._frequency(config), config['eta'], config.guard), window)
        else:
            system = self._system(config)
            report = aura_demo(S, E, system, self._boxes(config, system), window)
        store.write_csv('system_aura.csv', ['s', 'm', 'n'],
                        [[s, m, n] for s, (m, n) in sorted(report.witnesses.items())])
        return RunResult(f"{report.members.source}: {len(report.members)} members on {window}", report.to_dict())

    def system_bohr_check(self, config: RunConfig, store: ArtifactStore) -> RunResult:
        report = bohr_return_check(self._frequency(config), config['eta'], config['window'])
        violations = []
        for name, form in report.forms.items():
            if not form['measure_ok']:
                violations.append(f"{name}: mu(D) = {form['measure']}, expected {form['expected']}")
            violations.extend(f"{name}: return time {n} is outside Bohr(alpha, {report.eta})"
                              for n in form['violations'])
        return RunResult(f"R_0 inside Bohr(alpha, {report.eta}) on {report.window}: "
                         f"{'holds' if report.holds else 'FAILS'}", report.to_dict(), violations)

    def density_falsify(self, config: RunConfig, store: ArtifactStore) -> RunResult:
        S = self._evaluator(config).enumerate(config['set'], config['window'])
        corpus = structured_corpus(Window.symmetric(config.caps.corpus_window), config.seed)
        found = delta_recurrence_falsify(S, config['delta'], corpus)
        payload = {
            'set': S.source, 'delta': str(config['delta']), 'corpus_size': len(corpus),
            'falsified': found is not None,
            'witness': found.to_dict() if found else None,
            'label': "falsified" if found else "not falsified (empirical)",
        }
        return RunResult(f"{S.source}: {payload['label']} at delta={config['delta']}", payload)

    def density_estimate(self, config: RunConfig, store: ArtifactStore) -> RunResult:
        S = self._evaluator(config).enumerate(config['set'], config['window'])
        est = upper_banach_density(S, config['blocks'])
        store.write_csv('density_estimate.csv', ['length', 'max_count', 'density'],
                        [[L, c, str(dn)] for L, c, dn in est.rows])
        return RunResult(f"{S.source}: upper Banach density estimate {est.estimate}",
                         dict(est.to_dict(), set=S.source))

    # ------------------------------------------------------------------
    # kleitman
    # ------------------------------------------------------------------

    def kleitman_verify(self, config: RunConfig, store: ArtifactStore) -> RunResult:
        inst = KleitmanInstance(config['k'], config['d'], config['delta'], config['r'],
                                config['mode'], config['trials'], config.seed)
        result = kleitman_check(inst, config.caps.kleitman_cap, config.workers, config['all_sizes'])
        payload = result.to_dict(config.timings)
        violations = []
        if inst.mode is Mode.EXHAUSTIVE and result.holds and inst.r < inst.d:
            wider = kleitman_check(KleitmanInstance(inst.k, inst.d, inst.delta, inst.r + 1),
                                   config.caps.kleitman_cap, config.workers)
            payload['next_radius_holds'] = wider.holds
            if not wider.holds:
                violations.append(f"holds at r={inst.r} but fails at r={inst.r + 1}")
        if result.holds:
            summary = f"k={inst.k} d={inst.d} delta={inst.delta} r={inst.r}: holds"
        else:
            A, x = result.counterexample
            summary = f"k={inst.k} d={inst.d} delta={inst.delta} r={inst.r}: counterexample A={A}, x={x}"
        return RunResult(summary, payload, violations)

    def kleitman_witness(self, config: RunConfig, store: ArtifactStore) -> RunResult:
        freq = self._frequency(config)
        A = self._evaluator(config).enumerate(config['set'], config['window'])
        out = hamming_recurrence_witness(freq, config['eps'], config['m'], A, config['k'],
                                         config['search_bound'], config.get('radius'), config.get('delta'),
                                         config.caps.embedding_cap, config.guard)
        found = isinstance(out, HammingWitness)
        payload = dict(out.to_dict(), found=found, freq=freq.to_dict(), set=A.source)
        if found:
            summary = f"a={out.a}, b={out.b}: a - b in BH(alpha; {config['eps']}, {config['eps']}) + {out.m}"
        else:
            summary = f"No witness: stage '{out.stage}' failed"
        return RunResult(summary, payload)

    def kleitman_dimension(self, config: RunConfig, store: ArtifactStore) -> RunResult:
        report = empirical_dimension(config['k'], config['delta'], config['r'], config['d_max'],
                                     config.caps.kleitman_cap, config.workers)
        return RunResult(f"smallest d for k={config['k']}, delta={config['delta']}, r={config['r']}: "
                         f"{report['dimension']}", report)

    # ------------------------------------------------------------------
    # ks construction
    # ------------------------------------------------------------------

    def ks_build(self, config: RunConfig, store: ArtifactStore) -> RunResult:
        S = self._evaluator(config).enumerate(config['set'], config['window'])
        targets = config.get('targets')
        if targets is None:
            targets = tuple(int(m) for m in spiral(config['target_count'])[:config['target_count']])
        report = build_ks_pipeline(S, targets, config['stages'], config.caps, config.precision_bits,
                                   config.guard, config.seed)
        store.write_csv('measure.csv', ['target', 'x', 'weight'], report.measure_rows())
        store.write_csv('profile.csv', ['s', 'm', 'value', 'bound', 'ok', 'kind', 'stage'], report.profile_rows())
        summary = (f"{len(report.chains)} target(s), {config['stages']} stage(s): |S'| = {len(report.diagonal)}, "
                   f"{len(report.gaps)} gap(s), {len(report.violations)} violation(s)")
        return RunResult(summary, report.to_dict(), list(report.violations))

    def ks_profile(self, config: RunConfig, store: ArtifactStore) -> RunResult:
        families = build_cantor(config['branching'], shrink=config['shrink'], precision_bits=config.precision_bits)
        measures = [stage_measure(f) for f in families]
        seq = config.get('seq')
        if seq is None:
            if not config.get('set') or config.get('window') is None:
                raise ConfigError("give seq, or set together with window", 'seq')
            S = self._evaluator(config).enumerate(config['set'], config['window'])
            seq = tuple(S.spiral_members()[:config.caps.expand_cap])
        bound = config.get('bound')
        rows = rigidity_profile(seq, measures[-1], config['m'], [bound] * len(seq) if bound is not None else None)
        violations = check_families(families) + continuity_check(families, measures)
        store.write_csv('profile.csv', ['s', 'm', 'value', 'bound', 'ok'],
                        [[r['s'], r['m'], r['value'], r.get('bound', ''), r.get('ok', '')] for r in rows])
        payload = {
            'families': [f.to_dict() for f in families],
            'measure': measures[-1].to_dict(),
            'profile': rows,
        }
        failing = sum(1 for r in rows if r.get('ok') is False)
        return RunResult(f"{len(rows)} profile values against sigma_{len(families) - 1}"
                         + (f", {failing} above the bound" if bound is not None else ""), payload, violations)

    def ks_kronecker(self, config: RunConfig, store: ArtifactStore) -> RunResult:
        points = frequency_from_terms(config['points'], config.precision_bits)
        report = kronecker_condition(points.entries, config['k'], config['window'], config.caps.psi_cap,
                                     config.caps.psi_samples, config.seed, config.guard)
        summary = (f"Kronecker condition at k={report.k} on {config['window']}: "
                   f"{'holds' if report.holds else f'{len(report.missing)} phase function(s) without witness'}")
        return RunResult(summary, dict(report.to_dict(), points=points.to_dict()))

    # ------------------------------------------------------------------
    # verification of written results
    # ------------------------------------------------------------------

    def verify(self, path: str, output_dir: Optional[str] = None) -> RunResult:
        """
        Re-check the claims of a result file.

        Membership claims are checked point by point; results without
        pointwise claims are recomputed from the echoed configuration.
        """
        document = read_json(path)
        try:
            command, action = document['command'], document['action']
            values = dict(document['config'])
        except (KeyError, TypeError):
            raise ConfigError(f"{path} is not a minirec result file", 'verify')
        values['output_dir'] = output_dir or tempfile.mkdtemp(prefix="minirec_verify_")
        config = RunConfig.from_sources(command, action, values)
        checker = {
            ('bohr', 'enumerate'): self._verify_bohr,
            ('bh', 'enumerate'): self._verify_bh,
            ('kronecker', 'solve'): self._verify_solve,
            ('kronecker', 'embed'): self._verify_embed,
            ('system', 'returns'): self._verify_returns,
            ('kleitman', 'verify'): self._verify_kleitman,
            ('kleitman', 'witness'): self._verify_witness,
        }.get((command, action), self._verify_recompute)
        result = document['result']
        try:
            violations = checker(config, result)
        finally:
            if output_dir is None:
                shutil.rmtree(values['output_dir'], ignore_errors=True)
        verdict = "verified" if not violations else f"{len(violations)} claim(s) fail"
        return RunResult(f"{command} {action} from {os.path.basename(path)}: {verdict}",
                         {'path': path, 'violations': violations}, violations)

    def _verify_membership(self, result: Dict[str, Any], contains: Callable[[int], Verdict]) -> List[str]:
        members = WindowedSet.from_dict(result['set'])
        claimed = set(members.members)
        ambiguous = set(members.ambiguous)
        problems = []
        for n in members.window.values():
            n = int(n)
            verdict = contains(n)
            if n in claimed and verdict is not Verdict.YES:
                problems.append(f"n={n} is listed but evaluates to {verdict.name}")
            elif n not in claimed and n not in ambiguous and verdict is Verdict.YES:
                problems.append(f"n={n} is a member but is not listed")
        return problems

    def _verify_bohr(self, config: RunConfig, result: Dict[str, Any]) -> List[str]:
        spec = BohrSpec(self._frequency(config), config['eta'], config.guard)
        return self._verify_membership(result, lambda n: bohr_contains(spec, n))

    def _verify_bh(self, config: RunConfig, result: Dict[str, Any]) -> List[str]:
        spec = BohrHammingSpec(self._frequency(config), config['eps'], config['eta_frac'], config['shift'],
                               config.get('targets'), config.guard)
        return self._verify_membership(result, lambda n: bh_contains(spec, n))

    def _verify_solve(self, config: RunConfig, result: Dict[str, Any]) -> List[str]:
        if not result.get('found'):
            return self._verify_recompute(config, result)
        n = int(result['n'])
        yes, _ = orbit_norms(self._frequency(config), [n], config['target']).below(config['eps'], config.guard)
        problems = [] if yes.all() else [f"n={n} does not approximate the target within {config['eps']}"]
        if config['exclude_zero'] and n == 0:
            problems.append("n=0 returned although excluded")
        return problems

    def _verify_embed(self, config: RunConfig, result: Dict[str, Any]) -> List[str]:
        if not result.get('found'):
            return self._verify_recompute(config, result)
        table = EmbeddingTable.from_dict(result)
        problems = table.check(self._frequency(config), config.guard)
        expected = config['k'] ** table.d
        if len(table.mapping) != expected:
            problems.append(f"table covers {len(table.mapping)} of {expected} elements")
        return problems

    def _verify_returns(self, config: RunConfig, result: Dict[str, Any]) -> List[str]:
        system = self._system(config)
        D = self._boxes(config, system)
        c = config['c']
        problems = []
        for n in WindowedSet.from_dict(result['members']).members:
            lower, _, _ = intersection_bounds(system, D, n)
            if not lower > c:
                problems.append(f"n={n}: mu(D & T^n D) >= {lower} is not certified above {c}")
        return problems

    def _verify_kleitman(self, config: RunConfig, result: Dict[str, Any]) -> List[str]:
        if result['holds']:
            return self._verify_recompute(config, result)
        inst = KleitmanInstance(config['k'], config['d'], config['delta'], config['r'])
        A = [tuple(a) for a in result['counterexample']['A']]
        x = tuple(result['counterexample']['x'])
        problems = []
        if len(set(A)) < inst.min_size:
            problems.append(f"|A| = {len(set(A))} is below ceil(delta k^d) = {inst.min_size}")
        ball = HammingBall(inst.k, inst.d, inst.r, x)
        for a, b in combinations(A, 2):
            for u, v in ((a, b), (b, a)):
                if hamming_ball_contains(ball, tuple((p - q) % inst.k for p, q in zip(u, v))):
                    problems.append(f"{u} - {v} lies in the ball around {x}")
        return problems

    def _verify_witness(self, config: RunConfig, result: Dict[str, Any]) -> List[str]:
        if not result.get('found'):
            return self._verify_recompute(config, result)
        A = self._evaluator(config).enumerate(config['set'], config['window'])
        a, b, m = int(result['a']), int(result['b']), int(result['m'])
        problems = [f"{v} is not in A" for v in (a, b) if v not in A]
        spec = BohrHammingSpec(self._frequency(config), config['eps'], config['eps'], shift=m, guard=config.guard)
        if bh_contains(spec, a - b) is not Verdict.YES:
            problems.append(f"a - b = {a - b} is not in {spec.describe()}")
        return problems

    def _verify_recompute(self, config: RunConfig, result: Dict[str, Any]) -> List[str]:
        handler = self._handlers[(config.command, config.action)]
        fresh = handler(config, ArtifactStore(config.output_dir)).payload
        encode = lambda data: json.dumps(data, cls=ResultEncoder, sort_keys=True)
        # the stored side went through the decoder, so compare both through one round trip
        stored = json.loads(encode(result))
        recomputed = json.loads(encode(fresh))
        recomputed.pop('runtime', None)
        stored.pop('runtime', None)
        if stored != recomputed:
            return [f"recomputed {config.command} {config.action} result differs from the stored one"]
        return []
