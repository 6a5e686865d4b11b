/* tslint:disable */
/* eslint-disable */

export class Playground {
    free(): void;
    [Symbol.dispose](): void;
    lastAttempts(): number;
    lastPassage(n: number, q: number): Float64Array;
    lineCount(): number;
    constructor(seed: number);
    /**
     * Gibbs resamples a block of lines on `[a, b]`.
     */
    resampleBlock(top: number, bottom: number, a: number, b: number): number;
    times(): Float64Array;
    /**
     * Displayed lines `sqrt(2) D(t) + t^2`, row-major.
     */
    values(): Float64Array;
    /**
     * Draws a watermelon and shows its top `keep` lines near the edge.
     */
    watermelon(big_n: number, keep: number, window: number): void;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_playground_free: (a: number, b: number) => void;
    readonly playground_lastAttempts: (a: number) => number;
    readonly playground_lastPassage: (a: number, b: number, c: number) => [number, number, number, number];
    readonly playground_lineCount: (a: number) => number;
    readonly playground_new: (a: number) => number;
    readonly playground_resampleBlock: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly playground_times: (a: number) => [number, number];
    readonly playground_values: (a: number) => [number, number];
    readonly playground_watermelon: (a: number, b: number, c: number, d: number) => [number, number];
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
