/**
 * CSV schemas of the haarcode CLI outputs, one zod row schema per file
 * family.  Header mismatches surface as errors naming the missing column.
 */
import { z } from "zod";

const num = z.coerce.number();
const int = z.coerce.number().int();

export const canonicalSweepRow = z.object({
  N: int,
  k: int,
  q: int,
  p: num,
  alpha: num,
  samples: int,
  ic_mean: num,
  ic_stderr: num,
  s1q_mean: num,
  s1q_stderr: num,
  s1rq_mean: num,
  s1rq_stderr: num,
  s2q_mean: num,
  s2q_stderr: num,
  accept_mean: num,
  accept_stderr: num,
  ic_ansatz: num,
  s2q_ansatz: num,
});

export const microHistRow = z.object({
  x: num,
  density: num,
  mp: num,
});

export const microSweepRow = z.object({
  N: int,
  k: int,
  q: int,
  w: int,
  samples: int,
  ic_mean: num,
  ic_stderr: num,
  s1q_mean: num,
  s1q_stderr: num,
  s1rq_mean: num,
  s1rq_stderr: num,
});

export const canonicalBandsRow = z.object({
  p: num,
  w: int,
  mean_emp: num,
  p10: num,
  p90: num,
  mean_ansatz: num,
  is_reservoir: int,
});

export const postselectThresholdsRow = z.object({
  alpha: num,
  p_c: num,
});

export const postselectBoundaryRow = z.object({
  w_over_N: num,
  p: num,
});

export const postselectEntropyRow = z.object({
  N: int,
  k: int,
  q: int,
  p: num,
  alpha: num,
  samples: int,
  s2q_mean: num,
  s2q_stderr: num,
  svn_sigma_mean: num,
  svn_sigma_stderr: num,
  s2q_ansatz: num,
  svn_sigma_ansatz: num,
});

export const postselectIcRow = z.object({
  N: int,
  k: int,
  q: int,
  p: num,
  alpha: num,
  samples: int,
  ic_post_mean: num,
  ic_post_stderr: num,
  xprime_nu1: num,
});

export type CanonicalSweepRow = z.infer<typeof canonicalSweepRow>;
export type MicroHistRow = z.infer<typeof microHistRow>;
export type MicroSweepRow = z.infer<typeof microSweepRow>;
export type CanonicalBandsRow = z.infer<typeof canonicalBandsRow>;
export type PostselectThresholdsRow = z.infer<typeof postselectThresholdsRow>;
export type PostselectBoundaryRow = z.infer<typeof postselectBoundaryRow>;
export type PostselectEntropyRow = z.infer<typeof postselectEntropyRow>;
export type PostselectIcRow = z.infer<typeof postselectIcRow>;
