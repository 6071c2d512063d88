/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_boundcurves_free: (a: number, b: number) => void;
export const __wbg_completion_free: (a: number, b: number) => void;
export const __wbg_searchtrace_free: (a: number, b: number) => void;
export const boundCurves: (a: number, b: number, c: number) => [number, number, number];
export const boundcurves_discrete: (a: number) => [number, number];
export const boundcurves_epsilon: (a: number) => [number, number];
export const boundcurves_lower: (a: number) => [number, number];
export const boundcurves_theorem1: (a: number) => [number, number];
export const completion_determined: (a: number) => number;
export const completion_estimate: (a: number) => [number, number];
export const completion_n: (a: number) => number;
export const completion_predicted: (a: number) => number;
export const completion_revealed: (a: number) => [number, number];
export const completion_rmse: (a: number) => number;
export const completion_truth: (a: number) => [number, number];
export const rankOneCompletion: (a: number, b: number, c: number) => [number, number, number];
export const searchtrace_costs: (a: number) => [number, number];
export const searchtrace_finalCost: (a: number) => number;
export const searchtrace_revealed: (a: number) => number;
export const searchtrace_rmse: (a: number) => number;
export const searchtrace_steps: (a: number) => [number, number];
export const walkrankSearch: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
