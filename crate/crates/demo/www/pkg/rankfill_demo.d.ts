/* tslint:disable */
/* eslint-disable */

export class BoundCurves {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    discrete(): Float64Array;
    epsilon(): Float64Array;
    lower(): Float64Array;
    theorem1(): Float64Array;
}

export class Completion {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    estimate(): Float64Array;
    /**
     * 1 where the entry was revealed.
     */
    revealed(): Uint8Array;
    /**
     * Row-major `n x n`.
     */
    truth(): Float64Array;
    readonly determined: number;
    readonly n: number;
    /**
     * `sqrt(1 - xi zeta)` for square matrices with sign factors.
     */
    readonly predicted: number;
    readonly rmse: number;
}

export class SearchTrace {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Violated revealed entries after each logged step.
     */
    costs(): Float64Array;
    steps(): Float64Array;
    readonly finalCost: number;
    readonly revealed: number;
    readonly rmse: number;
}

export function boundCurves(r: number, eps_max: number, points: number): BoundCurves;

export function rankOneCompletion(n: number, epsilon: number, seed: number): Completion;

export function walkrankSearch(n: number, r: number, epsilon: number, seed: number, max_steps: number): SearchTrace;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_boundcurves_free: (a: number, b: number) => void;
    readonly __wbg_completion_free: (a: number, b: number) => void;
    readonly __wbg_searchtrace_free: (a: number, b: number) => void;
    readonly boundCurves: (a: number, b: number, c: number) => [number, number, number];
    readonly boundcurves_discrete: (a: number) => [number, number];
    readonly boundcurves_epsilon: (a: number) => [number, number];
    readonly boundcurves_lower: (a: number) => [number, number];
    readonly boundcurves_theorem1: (a: number) => [number, number];
    readonly completion_determined: (a: number) => number;
    readonly completion_estimate: (a: number) => [number, number];
    readonly completion_n: (a: number) => number;
    readonly completion_predicted: (a: number) => number;
    readonly completion_revealed: (a: number) => [number, number];
    readonly completion_rmse: (a: number) => number;
    readonly completion_truth: (a: number) => [number, number];
    readonly rankOneCompletion: (a: number, b: number, c: number) => [number, number, number];
    readonly searchtrace_costs: (a: number) => [number, number];
    readonly searchtrace_finalCost: (a: number) => number;
    readonly searchtrace_revealed: (a: number) => number;
    readonly searchtrace_rmse: (a: number) => number;
    readonly searchtrace_steps: (a: number) => [number, number];
    readonly walkrankSearch: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
