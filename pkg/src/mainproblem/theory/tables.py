"""Inclination polynomials of the order 1-3 theory.

Every entry is a polynomial in ``X = s**2`` (``s = sin I``) spelled in the
factored form in which it is printed, expanded exactly at import.  Keys:

* ``GNORM_HAMILTONIAN_m[(j, k)]``: coefficient of ``(p/r)**j e**(2k)`` in the
  order-m Hamiltonian left after the argument of perigee is removed.
* ``GNORM_GENERATOR_m[(j, k, l)]``: coefficient of
  ``e**(2j + k%2) s**(2l) sin(k f + 2 l g)`` in the order-m generator of that
  transformation; the ``k == 0`` rows belong to its integration constant.
* ``DNORM_HAMILTONIAN_m[j]``: coefficient of ``eta**j`` in the fully reduced
  order-m Hamiltonian.
* ``DNORM_GENERATOR_m[(j, k)]``: coefficient of ``eta**k e**j sin(j f)`` in the
  order-m generator that removes the mean anomaly.
* ``DNORM_CENTER_m``: coefficients of the terms proportional to the equation
  of the center in that generator.
* ``RATE_LATITUDE``, ``RATE_PERIGEE``, ``RATE_NODE``: ``[(m, i)]`` coefficient
  of ``eta**i`` in the order-m secular rates.
"""

from fractions import Fraction

from .polynomials import Poly, X

GNORM_HAMILTONIAN_2 = {
    (0, 0): -8*(200*X**3-455*X**2+345*X-88),
    (0, 1): 375*X**3-930*X**2+780*X-224,
    (1, 0): 5*(805*X**3-1878*X**2+1464*X-384),
    (2, 0): -825*X**3+1990*X**2-1616*X+448,
}

GNORM_HAMILTONIAN_3 = {
    (0, 0): -8*(5*X-4)*(313525*X**4-899030*X**3+933656*X**2-409296*X+61824),
    (0, 1): 4*(1551625*X**5-5675700*X**4+8148960*X**3-5706408*X**2+1930272*X-248064),
    (0, 2): -2*(40500*X**5-99525*X**4+64840*X**3+18788*X**2-33936*X+9408),
    (1, 0): 2*(5*X-4)*(2631475*X**4-7558270*X**3+7872692*X**2-3470616*X+530304),
    (1, 1): -3457125*X**5+12282750*X**4-17085020*X**3+11554040*X**2-3756000*X+459648,
    (2, 0): -2*(5*X-4)*(1584375*X**4-4536150*X**3+4716436*X**2-2082712*X+321408),
    (2, 1): 138375*X**5-128250*X**4-351900*X**3+612440*X**2-326368*X+56448,
    (3, 0): 8*(5*X-4)*(93300*X**4-259915*X**3+264982*X**2-116928*X+18816),
    (4, 0): -20*X*(5*X-4)*(15*X-14)*(45*X**2+36*X-56),
}

GNORM_GENERATOR_2 = {
    (1, -1, 1): -12*(5*X-4)*(7*X-6)*(15*X-14),
    (0, 1, 1): -48*(5*X-4)*(195*X**2-340*X+148),
    (1, 1, 1): 24*(5*X-4)**2*(15*X-14),
    (1, 1, 2): -3*(225*X**2-430*X+208),
    (0, 2, 1): -96*(5*X-4)**2*(9*X-8),
    (1, 2, 1): -24*(5*X-4)*(65*X**2-116*X+52),
    (1, 2, 2): -60*(50*X**2-87*X+38),
    (0, 3, 1): -64*(5*X-4)**2*(8*X-7),
    (1, 3, 1): 4*(3*X-2)*(5*X-4)*(15*X-14),
    (0, 3, 2): -4*(5*X-4)*(135*X-122),
    (1, 3, 2): -8*(75*X**2-135*X+61),
    (1, 4, 1): -12*(5*X-4)**2*(7*X-6),
    (0, 4, 2): 24*(5*X-4)**2,
    (1, 4, 2): -12*(5*X-4)*(25*X-23),
    (0, 5, 2): 24*(5*X-4)**2,
    (1, 5, 2): -3*(5*X-4)*(15*X-14),
    (1, 6, 2): 6*(5*X-4)**2,
    (0, 0, 2): (15*X-14)**2*(15*X-13),
    (0, 0, 1): 8*(5*X-4)**2*(1215*X**2-1997*X+824),
    (1, 0, 1): -2*(5*X-4)*(15*X-14)*(45*X**2+36*X-56),
}

GNORM_GENERATOR_3 = {
    (2, -3, 1): 35*(15*X-14)*(87375*X**5-335550*X**4+505080*X**3-371184*X**2+132096*X-17920),
    (2, -2, 1): 105*(15*X-14)*(399375*X**5-1863400*X**4+3389440*X**3-3023632*X**2+1328128*X-230400),
    (1, -1, 1): -840*(5*X-4)*(228125*X**5-549325*X**4+255940*X**3+324664*X**2-352992*X+93824),
    (2, -1, 1): 210*(15*X-14)*(100875*X**5-275600*X**4+228220*X**3-6408*X**2-70272*X+23296),
    (2, -1, 2): -105*(5*X-4)*(15*X-14)*(13725*X**3-37680*X**2+34228*X-10304),
    (0, 1, 1): -1680*(5*X-4)**2*(486525*X**4-1594290*X**3+1955772*X**2-1064576*X+216960),
    (1, 1, 1): 840*(5*X-4)*(1531125*X**5-6503075*X**4+10982780*X**3-9224760*X**2+3855648*X-641920),
    (2, 1, 1): -420*(15*X-14)*(61875*X**5-138825*X**4+51640*X**3+92200*X**2-89088*X+22400),
    (1, 1, 2): 1680*(5*X-4)*(240750*X**4-775475*X**3+932445*X**2-495822*X+98320),
    (2, 1, 2): 105*(5*X-4)*(226125*X**4-787950*X**3+1015020*X**2-572056*X+118944),
    (2, 1, 3): -840*(15*X-14)*(1125*X**3-3300*X**2+3235*X-1058),
    (0, 2, 1): -1680*(5*X-4)**3*(41615*X**3-97838*X**2+76016*X-19488),
    (1, 2, 1): -1680*(5*X-4)*(666875*X**5-2586600*X**4+4014940*X**3-3117320*X**2+1210368*X-187904),
    (2, 2, 1): 210*(5398125*X**6-27480750*X**5+57999400*X**4-64973520*X**3+40757888*X**2-13579264*X+1878016),
    (1, 2, 2): -3360*(5*X-4)**2*(42850*X**3-108830*X**2+92099*X-25958),
    (2, 2, 2): 840*(5*X-4)*(123750*X**4-359475*X**3+378010*X**2-167724*X+25624),
    (2, 2, 3): -105*(639375*X**4-2259750*X**3+2991200*X**2-1757840*X+387104),
    (0, 3, 1): -1120*(5*X-4)**2*(270650*X**4-828285*X**3+945816*X**2-477232*X+89664),
    (1, 3, 1): 280*(5*X-4)*(634500*X**5-2623725*X**4+4300340*X**3-3496152*X**2+1412352*X-227584),
    (2, 3, 1): -70*(15*X-14)*(76875*X**5-202950*X**4+167700*X**3-16544*X**2-37376*X+12544),
    (0, 3, 2): -560*(5*X-4)**2*(605775*X**3-1524950*X**2+1277728*X-356256),
    (1, 3, 2): 560*(5*X-4)**2*(9150*X**3-6435*X**2-9741*X+7154),
    (2, 3, 2): 35*(5*X-4)*(104625*X**4-68850*X**3-286620*X**2+378936*X-127232),
    (1, 3, 3): -280*(5*X-4)*(52875*X**3-129225*X**2+102900*X-26456),
    (2, 3, 3): -140*(15*X-14)*(7875*X**3-21225*X**2+19120*X-5756),
    (1, 4, 1): -840*(5*X-4)*(516875*X**5-1956050*X**4+2950940*X**3-2217472*X**2+829440*X-123392),
    (2, 4, 1): 420*(5*X-4)*(173625*X**5-668250*X**4+1023720*X**3-780120*X**2+295872*X-44800),
    (0, 4, 2): -6720*(5*X-4)**3*(730*X**2-1153*X+444),
    (1, 4, 2): -3360*(5*X-4)**2*(66050*X**3-166215*X**2+139230*X-38808),
    (2, 4, 2): 420*(5*X-4)**2*(20925*X**3-38700*X**2+19984*X-1976),
    (1, 4, 3): 840*(5*X-4)*(10125*X**3-32150*X**2+33500*X-11456),
    (2, 4, 3): -2100*(5*X-4)*(3525*X**3-9240*X**2+7996*X-2280),
    (1, 5, 1): -168*(5*X-4)*(115000*X**5-434875*X**4+663700*X**3-512080*X**2+199936*X-31488),
    (2, 5, 1): -105*X*(5*X-4)*(15*X-14)*(825*X**3-1990*X**2+1616*X-448),
    (0, 5, 2): -336*(5*X-4)**3*(15425*X**2-24050*X+9112),
    (1, 5, 2): -84*(5*X-4)**2*(551625*X**3-1390850*X**2+1167040*X-325728),
    (2, 5, 2): 105*(5*X-4)**2*(15*X-14)*(225*X**2+288*X-364),
    (0, 5, 3): 3360*(5*X-4)**2*(1575*X**2-2795*X+1256),
    (1, 5, 3): 840*(5*X-4)*(8250*X**3-24975*X**2+25080*X-8336),
    (2, 5, 3): -420*(5*X-4)*(15*X-14)**2*(15*X-13),
    (2, 6, 1): 35*(5*X-4)*(171375*X**5-616950*X**4+871680*X**3-600128*X**2+199168*X-25088),
    (1, 6, 2): -280*(5*X-4)**3*(8265*X**2-12874*X+4872),
    (2, 6, 2): -280*(5*X-4)**2*(11475*X**3-29280*X**2+24828*X-6992),
    (0, 6, 3): 560*(5*X-4)**3*(1335*X-1166),
    (1, 6, 3): 560*(5*X-4)**2*(8325*X**2-14910*X+6764),
    (2, 6, 3): 70*(5*X-4)*(21375*X**3-61950*X**2+59960*X-19328),
    (1, 7, 2): -60*(5*X-4)**3*(8385*X**2-13226*X+5080),
    (0, 7, 3): 10080*(5*X-4)**3*(90*X-79),
    (1, 7, 3): 12600*(5*X-4)**2*(105*X**2-191*X+88),
    (2, 8, 2): -840*(3*X-2)*(5*X-4)**3*(15*X-14),
    (1, 8, 3): 4200*(5*X-4)**3*(96*X-85),
    (2, 8, 3): 210*(5*X-4)**2*(525*X**2-990*X+472),
    (1, 9, 3): 7560*(5*X-4)**3*(10*X-9),
    (2, 10, 3): 315*(5*X-4)**3*(15*X-14),
    (0, 0, 3): 2*(15*X-14)**3*(825*X**2-1445*X+634),
    (0, 0, 2): -6*(5*X-4)**2*(2171250*X**4-7719525*X**3+10225470*X**2-5983260*X+1305248),
    (1, 0, 2): -3*(5*X-4)*(15*X-14)**2*(1800*X**3+2655*X**2-8208*X+3928),
    (0, 0, 1): 48*(5*X-4)**2*(9060750*X**5-34431275*X**4+51858720*X**3-38675200*X**2+14258176*X-2072064),
    (1, 0, 1): -12*(5*X-4)*(93223125*X**6-421210500*X**5+784654200*X**4-771469840*X**3+422629664*X**2-122600960*X+14780416),
    (2, 0, 1): 6*(15*X-14)*(2328750*X**6-8703375*X**5+13317150*X**4-10848180*X**3+5157560*X**2-1450624*X+200704),
}

DNORM_GENERATOR_2 = {
    (1, 0): 15*(3*X-2)*(805*X**3-2448*X**2+2400*X-768),
    (1, 1): 3*(3*X-2)*(2225*X**3-8160*X**2+8928*X-3072),
    (1, 2): 3*(825*X**4-3030*X**3+4064*X**2-2368*X+512),
    (1, 3): -3*X*(975*X**3-2250*X**2+1728*X-448),
    (2, 0): 6*(1925*X**4-6210*X**3+7452*X**2-3936*X+768),
    (2, 1): 6*(125*X**4-930*X**3+1660*X**2-1120*X+256),
    (3, 0): 2625*X**4-7270*X**3+7408*X**2-3264*X+512,
    (3, 1): X*(825*X**3-1990*X**2+1616*X-448),
}

DNORM_GENERATOR_3 = {
    (1, 0): -864*(3*X-2)**3*(5*X-4)**3,
    (1, 1): 3*(22218875*X**6-104346550*X**5+202703740*X**4-209869352*X**3+123038240*X**2-39033472*X+5275648),
    (1, 2): 12*(10925500*X**6-50711075*X**5+97386820*X**4-99715748*X**3+57863024*X**2-18199872*X+2445312),
    (1, 3): 3*(27560125*X**6-119080550*X**5+212650740*X**4-202245448*X**3+109190304*X**2-32208768*X+4128768),
    (1, 4): 12*(3155125*X**6-10820800*X**5+13899620*X**4-7620256*X**3+944256*X**2+613248*X-167936),
    (1, 5): 3*(5410625*X**6-17331450*X**5+19448180*X**4-6842968*X**3-2742560*X**2+2556544*X-491520),
    (1, 6): -12*(59625*X**6-415275*X**5+942920*X**4-994980*X**3+529776*X**2-134592*X+12288),
    (1, 7): -3*X*(77625*X**5-568950*X**4+1256420*X**3-1222216*X**2+550816*X-94080),
    (2, 0): -1044*(3*X-2)**3*(5*X-4)**3,
    (2, 1): 24*(131000*X**6-1121875*X**5+3061340*X**4-3989664*X**3+2758768*X**2-983648*X+143360),
    (2, 2): 96*(51625*X**6-437800*X**5+1183290*X**4-1528682*X**3+1049344*X**2-372240*X+54144),
    (2, 3): -12*(5*X-4)*(16375*X**5+64070*X**4-257508*X**3+297320*X**2-145792*X+26624),
    (2, 4): -12*(263625*X**6-1000750*X**5+1526820*X**4-1206712*X**3+539616*X**2-142592*X+19968),
    (2, 5): -12*X*(162375*X**5-576100*X**4+787020*X**3-506248*X**2+145984*X-12992),
    (3, 0): -656*(3*X-2)**3*(5*X-4)**3,
    (3, 1): -934875*X**6+605000*X**5+4973120*X**4-10412952*X**3+8554272*X**2-3281280*X+491520,
    (3, 2): -2080125*X**6+3562000*X**5+2881300*X**4-11103360*X**3+10155456*X**2-4038912*X+614400,
    (3, 3): -(5*X-4)*(254925*X**5-526480*X**4+318084*X**3-10672*X**2-40064*X+8192),
    (3, 4): 3*(28875*X**6-147800*X**5+254260*X**4-160992*X**3-11968*X**2+54016*X-16384),
    (3, 5): -12*X*(4500*X**5-4125*X**4-16075*X**3+31670*X**2-20664*X+4704),
    (4, 0): -240*(3*X-2)**3*(5*X-4)**3,
    (4, 1): 6*(5*X-4)*(50325*X**5-157660*X**4+180520*X**3-90312*X**2+18112*X-1024),
    (4, 2): 12*(5*X-4)*(47475*X**5-147000*X**4+164852*X**3-79056*X**2+14208*X-512),
    (4, 3): 6*X*(5*X-4)*(44625*X**4-136340*X**3+149184*X**2-67800*X+10304),
    (5, 0): -48*(3*X-2)**3*(5*X-4)**3,
    (5, 1): 6*X*(5*X-4)**2*(180*X**3-609*X**2+530*X-112),
    (5, 2): 3*X*(5*X-4)*(1125*X**4-7440*X**3+11516*X**2-6144*X+896),
    (5, 3): -3*X**2*(5*X-4)*(15*X-14)*(45*X**2+36*X-56),
    (6, 0): -4*(3*X-2)**3*(5*X-4)**3,
}

DNORM_HAMILTONIAN_3 = {
    0: 5*(28700*X**5-107205*X**4+158960*X**3-118492*X**2+45152*X-7168),
    1: 60*(3*X-2)*(5*X-4)**2*(7*X**2-16*X+8),
    2: -2*(28675*X**5-98005*X**4+130852*X**3-87164*X**2+30176*X-4608),
    3: 20*(3*X-2)*(5*X-4)**2*(5*X**2+8*X-8),
    4: -X*(15*X-14)*(450*X**3-925*X**2+590*X-112),
}

DNORM_CENTER_3 = {
    (0, 0): 5*(89100*X**5-323615*X**4+466320*X**3-337684*X**2+125216*X-19456),
    (0, 2): -2*(112125*X**5-374775*X**4+488460*X**3-314932*X**2+103840*X-14848),
    (0, 3): 8*(3*X-2)*(5*X-4)**2*(5*X**2+8*X-8),
    (0, 4): -3*X*(15*X-14)*(450*X**3-925*X**2+590*X-112),
}

RATE_LATITUDE = {
    (1, 0): -3*(5*X-4)**2,
    (1, 1): -3*(3*X-2)*(5*X-4),
    (2, 0): Fraction(15,8)*(5*X-4)**2*(77*X**2-172*X+88),
    (2, 1): Fraction(9,8)*(5*X-4)**2*(155*X**2-256*X+104),
    (2, 2): Fraction(3,8)*(5*X-4)**2*(189*X**2-156*X+8),
    (2, 3): Fraction(15,8)*(5*X-4)**2*(5*X**2+8*X-8),
    (3, 0): -Fraction(15,32)*(2439500*X**6-11312175*X**5+21772080*X**4-22346500*X**3+12956400*X**2-4043136*X+533248),
    (3, 1): -Fraction(45,32)*(5*X-4)*(62300*X**5-260365*X**4+431504*X**3-356508*X**2+147552*X-24576),
    (3, 2): Fraction(3,16)*(1835625*X**6-7723875*X**5+13291500*X**4-12015300*X**3+6064176*X**2-1644928*X+192256),
    (3, 3): Fraction(15,16)*(5*X-4)*(18175*X**5-85105*X**4+153172*X**3-136540*X**2+61408*X-11264),
    (3, 4): Fraction(3,32)*(213750*X**6-1441125*X**5+3537000*X**4-4313100*X**3+2835280*X**2-967808*X+135424),
    (3, 5): Fraction(21,32)*X*(5*X-4)*(15*X-14)*(450*X**3-925*X**2+590*X-112),
}

RATE_PERIGEE = {
    (1, 0): -3*(5*X-4)**2,
    (2, 0): Fraction(15,8)*(5*X-4)**2*(77*X**2-172*X+88),
    (2, 1): 9*(3*X-2)*(5*X-4)**3,
    (2, 2): Fraction(3,8)*(5*X-4)**2*(45*X**2+36*X-56),
    (3, 0): -Fraction(15,32)*(2439500*X**6-11312175*X**5+21772080*X**4-22346500*X**3+12956400*X**2-4043136*X+533248),
    (3, 1): -Fraction(45,4)*(5*X-4)**3*(168*X**3-497*X**2+460*X-136),
    (3, 2): Fraction(3,16)*(2150625*X**6-9409875*X**5+16968300*X**4-16218180*X**3+8729136*X**2-2535808*X+315136),
    (3, 3): -Fraction(15,4)*(5*X-4)**3*(105*X**3+39*X**2-228*X+104),
    (3, 4): Fraction(3,32)*(438750*X**6-1771125*X**5+2865000*X**4-2345100*X**3+999760*X**2-199808*X+12544),
}

RATE_NODE = {
    (1, 0): -6*(5*X-4),
    (2, 0): Fraction(15,2)*(5*X-4)**2*(7*X-8),
    (2, 1): 18*(3*X-2)*(5*X-4)**2,
    (2, 2): Fraction(3,2)*(5*X-4)**2*(5*X+4),
    (3, 0): -Fraction(15,8)*(215250*X**5-823025*X**4+1255040*X**3-953760*X**2+361088*X-54464),
    (3, 1): -Fraction(45,4)*(5*X-4)**3*(63*X**2-124*X+56),
    (3, 2): Fraction(3,8)*(430125*X**5-1553550*X**4+2222340*X**3-1570224*X**2+546432*X-74624),
    (3, 3): -Fraction(15,4)*(5*X-4)**3*(45*X**2+28*X-40),
    (3, 4): Fraction(3,8)*(50625*X**5-168375*X**4+215900*X**3-130800*X**2+35840*X-3136),
}

DNORM_HAMILTONIAN_2 = {
    0: 5*(7*X**2-16*X+8),
    1: 4*(3*X-2)**2,
    2: 5*X**2+8*X-8,
}

DNORM_CENTER_2 = {
    0: 8*(X-1)*(5*X-4),
    1: 8-8*X-5*X**2,
}

# Rows of the order-3 center table fixed by ratios to the (0, 3) entry.
_C03 = DNORM_CENTER_3[(0, 3)]
DNORM_CENTER_3.update({
    (1, 0): Fraction(15, 2)*_C03,
    (1, 2): Fraction(-3, 2)*_C03,
    (2, 0): 3*_C03,
    (3, 0): Fraction(1, 2)*_C03,
})
del _C03

GNORM_HAMILTONIAN = {2: GNORM_HAMILTONIAN_2, 3: GNORM_HAMILTONIAN_3}
GNORM_GENERATOR = {2: GNORM_GENERATOR_2, 3: GNORM_GENERATOR_3}
DNORM_HAMILTONIAN = {2: DNORM_HAMILTONIAN_2, 3: DNORM_HAMILTONIAN_3}
DNORM_GENERATOR = {2: DNORM_GENERATOR_2, 3: DNORM_GENERATOR_3}
DNORM_CENTER = {2: DNORM_CENTER_2, 3: DNORM_CENTER_3}

#: Name used for each table in the JSON audit dump.
NAMED_TABLES: dict[str, dict] = {
    "gamma2": GNORM_HAMILTONIAN_2,
    "gamma3": GNORM_HAMILTONIAN_3,
    "Gamma2": GNORM_GENERATOR_2,
    "Gamma3": GNORM_GENERATOR_3,
    "lambda2": DNORM_HAMILTONIAN_2,
    "lambda3": DNORM_HAMILTONIAN_3,
    "Lambda2": DNORM_GENERATOR_2,
    "Lambda3": DNORM_GENERATOR_3,
    "Phi2": DNORM_CENTER_2,
    "Phi3": DNORM_CENTER_3,
    "Psi": RATE_LATITUDE,
    "omega": RATE_PERIGEE,
    "Omega": RATE_NODE,
}


def _key(k) -> str:
    return ",".join(str(v) for v in k) if isinstance(k, tuple) else str(k)


def tables_as_dict() -> dict:
    """All tables keyed by name then index string, coefficients in descending powers of s^2."""
    return {
        name: {_key(k): table[k].descending() for k in sorted(table)}
        for name, table in NAMED_TABLES.items()
    }
