"""Daubechies extremal-phase scaling filters, orders 2..10.

Standard published coefficients (Daubechies, "Ten Lectures on Wavelets",
Table 6.1), regenerated by spectral factorization of
P(y) = sum_{k<K} C(K-1+k,k) y^k at 60-digit precision and rounded to
double.  Order K has K vanishing moments, filter length 2K, and scaling
function support [0, 2K-1].  Each filter sums to sqrt(2).
"""

DB_FILTERS: dict[int, tuple[float, ...]] = {
    2: (
        0.48296291314453414337,
        0.83651630373780790558,
        0.22414386804201338103,
        -0.12940952255126038117,
    ),
    3: (
        0.33267055295008261600,
        0.80689150931109257649,
        0.45987750211849157010,
        -0.13501102001025458870,
        -0.08544127388202666169,
        0.03522629188570953660,
    ),
    4: (
        0.23037781330889650086,
        0.71484657055291564709,
        0.63088076792985890788,
        -0.02798376941685985421,
        -0.18703481171909308408,
        0.03084138183556076363,
        0.03288301166688519974,
        -0.01059740178506903210,
    ),
    5: (
        0.16010239797419291448,
        0.60382926979718967054,
        0.72430852843777292773,
        0.13842814590132073151,
        -0.24229488706638203186,
        -0.03224486958463837465,
        0.07757149384004571352,
        -0.00624149021279827427,
        -0.01258075199908199947,
        0.00333572528547377128,
    ),
    6: (
        0.11154074335010946362,
        0.49462389039845308568,
        0.75113390802109535068,
        0.31525035170919762909,
        -0.22626469396543982008,
        -0.12976686756726193556,
        0.09750160558732304910,
        0.02752286553030572863,
        -0.03158203931748602957,
        0.00055384220116149613,
        0.00477725751094551064,
        -0.00107730108530847956,
    ),
    7: (
        0.07785205408500917902,
        0.39653931948191730654,
        0.72913209084623511992,
        0.46978228740519312247,
        -0.14390600392856497541,
        -0.22403618499387498264,
        0.07130921926683026475,
        0.08061260915108307191,
        -0.03802993693501441358,
        -0.01657454163066688065,
        0.01255099855609984061,
        0.00042957797292136652,
        -0.00180164070404749092,
        0.00035371379997452025,
    ),
    8: (
        0.05441584224310400995,
        0.31287159091429997066,
        0.67563073629728980681,
        0.58535468365420671277,
        -0.01582910525634930567,
        -0.28401554296154692652,
        0.00047248457391328277,
        0.12874742662047845886,
        -0.01736930100180754617,
        -0.04408825393079475151,
        0.01398102791739828165,
        0.00874609404740577672,
        -0.00487035299345157431,
        -0.00039174037337694705,
        0.00067544940645056937,
        -0.00011747678412476953,
    ),
    9: (
        0.03807794736387834659,
        0.24383467461259035373,
        0.60482312369011111190,
        0.65728807805130053808,
        0.13319738582500757619,
        -0.29327378327917490881,
        -0.09684078322297646051,
        0.14854074933810638014,
        0.03072568147933337921,
        -0.06763282906132997368,
        0.00025094711483145196,
        0.02236166212367909721,
        -0.00472320475775139728,
        -0.00428150368246342983,
        0.00184764688305622648,
        0.00023038576352319597,
        -0.00025196318894271014,
        0.00003934732031627160,
    ),
    10: (
        0.02667005790055555359,
        0.18817680007769148902,
        0.52720118893172558648,
        0.68845903945360356574,
        0.28117234366057746075,
        -0.24984642432731537942,
        -0.19594627437737704350,
        0.12736934033579326008,
        0.09305736460357235116,
        -0.07139414716639708714,
        -0.02945753682187581286,
        0.03321267405934100174,
        0.00360655356695616966,
        -0.01073317548333057504,
        0.00139535174705290117,
        0.00199240529518505612,
        -0.00068585669495971163,
        -0.00011646685512928545,
        0.00009358867032006959,
        -0.00001326420289452124,
    ),
}
