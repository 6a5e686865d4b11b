/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_playground_free: (a: number, b: number) => void;
export const playground_lastAttempts: (a: number) => number;
export const playground_lastPassage: (a: number, b: number, c: number) => [number, number, number, number];
export const playground_lineCount: (a: number) => number;
export const playground_new: (a: number) => number;
export const playground_resampleBlock: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const playground_times: (a: number) => [number, number];
export const playground_values: (a: number) => [number, number];
export const playground_watermelon: (a: number, b: number, c: number, d: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
